#pragma once

// Per-network sweep machinery shared by the single and joint fits.

#include "ghsnet/ecm.hpp"

namespace ghs::detail {

struct NetworkState {
    const ScatterStats* stats;
    PrecisionState precision;
    Matrix lambda_sq;
    double tau_sq;

    NetworkState(const ScatterStats& s, Matrix theta, Matrix lambda, double tau);
    Index p() const { return precision.theta.rows(); }
};

/// Initial (theta, lambda^2) from a warm start or the identity / all-ones default.
std::pair<Matrix, Matrix> initial_point(Index p, const std::optional<WarmStart>& warm);

/// lambda_ij^2 <- cm_lambda(theta_ij, inv_nu_ij, tau^2) for all i < j.
void lambda_sweep(NetworkState& net, const Matrix& inv_nu);

/// Column updates 0..p-1 followed by a full refresh of the maintained inverse.
void theta_sweep(NetworkState& net, int iteration, const FitObserver& observer, double min_pivot);

/// Network-specific objective terms: likelihood plus the theta / lambda prior terms
/// (-2 log lambda^2 - theta^2/(2 tau^2 lambda^2)), excluding every nu term.
double network_terms(const NetworkState& net);

double max_abs_diff(const Matrix& a, const Matrix& b);

} // namespace ghs::detail
