#pragma once

#include "ghsnet/model.hpp"
#include "ghsnet/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ghs {

enum class TauMode {
    Fixed,   ///< tau^2 held at EcmConfig::tau_sq
    Updated, ///< tau^2 re-estimated each iteration starting from EcmConfig::tau_sq (diagnostic only)
};

struct EcmConfig {
    double tol = 1e-3;  ///< max elementwise |theta change| for convergence
    int max_iter = 10000;
    TauMode tau_mode = TauMode::Fixed;
    double tau_sq = 1.0;         ///< fixed value, or initial value under TauMode::Updated
    double epsilon_eig = 1e-10; ///< smallest Cholesky pivot accepted when refreshing Theta^{-1}

    static EcmConfig fixed(double tau_sq);
    static EcmConfig updated(double initial_tau_sq);
    void validate() const;
};

struct EcmFit {
    PrecisionMatrix theta;
    ScaleMatrix lambda_sq;
    GlobalScale tau_sq;
    int iterations = 0;
    bool converged = false;
    /// log_posterior (nu integrated out) after each full iteration; non-decreasing.
    std::vector<double> objective_trace;
    /// tau^2 after each iteration (constant under TauMode::Fixed).
    std::vector<double> tau_trace;
};

/// Starting point for a fit; Theta must be PD and Lambda strictly positive.
struct WarmStart {
    Matrix theta;
    Matrix lambda_sq;
};

/// Callbacks for instrumentation. Neither may modify the fit. on_iteration receives the
/// ECM objective before and after the CM sweeps, both under that iteration's E-step.
struct FitObserver {
    std::function<void(int iteration, Index column, const Matrix& theta)> on_column;
    std::function<void(int iteration, double objective_before, double objective_after)> on_iteration;
};

struct FitOptions {
    std::optional<WarmStart> warm_start;
    FitObserver observer;
};

/// Theta together with its maintained inverse.
struct PrecisionState {
    Matrix theta;
    Matrix sigma;

    explicit PrecisionState(Matrix theta_init);
    /// Recompute sigma = theta^{-1} from scratch.
    void refresh_inverse(double min_pivot = 0.0);
};

LatentSummary e_step_single(const ScaleMatrix& lambda_sq);
LatentSummary e_step_single(const Matrix& lambda_sq);

/// Closed-form maximiser of the lambda_ij^2 terms: (E[1/nu] + theta^2/(2 tau^2)) / 2.
double cm_lambda(double theta_ij, double inv_nu, double tau_sq);

/**
 * Blockwise update of row/column `col` of Theta with the others held fixed:
 *   theta_{-j,j} = -(s_jj Theta_{-j,-j}^{-1} + diag(lambda_{-j,j}^2 tau^2)^{-1})^{-1} s_{-j,j}
 *   theta_jj     = theta_{-j,j}^T Theta_{-j,-j}^{-1} theta_{-j,j} + n / s_jj
 * Theta_{-j,-j}^{-1} is taken from the maintained inverse, which is updated in place.
 */
void cm_theta_column(PrecisionState& state, const Matrix& lambda_sq, double tau_sq,
                     const ScatterStats& stats, Index col);

/// tau^2 update when tau carries its own half-Cauchy prior.
double cm_tau_update(const Matrix& theta, const Matrix& lambda_sq, double tau_sq_prev);

EcmFit fit_single(const Dataset& data, const EcmConfig& config, const FitOptions& options = {});
EcmFit fit_single(const ScatterStats& stats, const EcmConfig& config, const FitOptions& options = {});

} // namespace ghs
