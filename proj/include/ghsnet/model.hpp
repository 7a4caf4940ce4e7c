#pragma once

#include "ghsnet/types.hpp"

namespace ghs {

/// Euler-Mascheroni constant; psi(1) = -kEulerGamma.
inline constexpr double kEulerGamma = 0.5772156649015329;

/// Digamma at positive integer or half-integer arguments, by upward recurrence
/// from psi(1) and psi(1/2).
double digamma_half_integer(double x);

/// Off-diagonal -theta_ij / sqrt(theta_ii theta_jj); unit diagonal.
Matrix partial_correlations(const PrecisionMatrix& theta);
Matrix partial_correlations(const Matrix& theta);

/// theta_ij / sqrt(theta_ii theta_jj), the sign-preserving scaled element.
double scaled_element(const Matrix& theta, Index i, Index j);

GraphEstimate extract_graph(const PrecisionMatrix& theta, double threshold = kDefaultEdgeThreshold);

/// log det of a PD matrix via Cholesky; throws DomainError otherwise.
double log_det_pd(const Matrix& m);

/**
 * ECM objective up to its additive constant:
 *   (n/2) log det(theta) - tr(S theta)/2
 *   + sum_{i<j} { -2 log lambda_ij^2 - theta_ij^2 / (2 tau^2 lambda_ij^2)
 *                 - 2 E[log nu_ij] - (1/lambda_ij^2 + 1) E[1/nu_ij] }
 */
double objective_value(const Matrix& theta, const Matrix& lambda_sq, const LatentSummary& latent,
                       double tau_sq, const Matrix& scatter, int n);

double objective_value(const PrecisionMatrix& theta, const ScaleMatrix& lambda_sq,
                       const LatentSummary& latent, GlobalScale tau_sq, const Dataset& data);

/**
 * Log posterior of (theta, lambda^2) with every nu_ij integrated out, up to an
 * additive constant (tau^2 fixed):
 *   (n/2) log det(theta) - tr(S theta)/2
 *   + sum_{i<j} { -log lambda_ij^2 - log(1 + lambda_ij^2) - theta_ij^2 / (2 tau^2 lambda_ij^2) }
 * Each ECM iteration cannot decrease it, so fits record it as their trace.
 */
double log_posterior(const Matrix& theta, const Matrix& lambda_sq, double tau_sq, const Matrix& scatter,
                     int n);

/// Terms added to log_posterior when tau^2 is a parameter with a half-Cauchy prior on tau:
///   -(p(p-1)/4 + 1/2) log tau^2 - log(1 + tau^2).
double tau_log_prior_terms(Index p, double tau_sq);

/// Extra terms of the objective when tau^2 is itself updated, with the xi
/// expectations taken at the previous tau^2:
///   -(p(p-1)/2 + 3) log tau - 2 E[log xi] - (1 + 1/tau^2) E[1/xi].
double tau_objective_terms(Index p, double tau_sq, double tau_sq_prev);

} // namespace ghs
