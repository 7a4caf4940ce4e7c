#pragma once

#include "ghsnet/ecm.hpp"
#include "ghsnet/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace ghs {

/// Increasing tau^2 values scanned by select_tau, with the AIC stabilisation tolerance.
struct TauGrid {
    std::vector<double> values;
    double aic_epsilon = 0.1;

    /// `count` log-spaced values from `low` to `high` inclusive.
    static TauGrid geometric(double low, double high, int count, double aic_epsilon = 0.1);
    /// 18 log-spaced values from 1e-4 to 10.
    static TauGrid standard(double aic_epsilon = 0.1);
    void validate() const;
};

/// What the fit at grid point m inherits from the fit at m-1.
enum class WarmStartMode {
    None,       ///< every fit starts at (I, ones)
    Theta,      ///< previous Theta, local scales reset to ones
    ThetaLambda ///< previous Theta and local scales
};

struct TauSelectOptions {
    WarmStartMode warm_start = WarmStartMode::Theta;
    double edge_threshold = kDefaultEdgeThreshold;
};

struct TauSelection {
    double chosen_tau_sq;
    std::size_t chosen_index;
    std::vector<std::pair<double, double>> aic_trace; ///< (tau^2, AIC) for every grid point fitted
    bool stabilized;
    EcmFit fit; ///< the fit at the chosen grid point
};

/// n/(n-1) tr(S theta) - n log det(theta) + 2 |E|, with S the scatter X^T X.
double aic_score(const EcmFit& fit, const Dataset& data, double threshold = kDefaultEdgeThreshold);
double aic_score(const Matrix& theta, const ScatterStats& stats, double threshold = kDefaultEdgeThreshold);

/**
 * Fits the grid in ascending order and returns the first tau^2_m (m >= 1) with
 * |AIC(m) - AIC(m-1)| < epsilon. Falls back to the last grid value with
 * stabilized = false. config.tau_mode must be Fixed; config.tau_sq is ignored.
 */
TauSelection select_tau(const Dataset& data, const TauGrid& grid, const EcmConfig& config,
                        const TauSelectOptions& options = {});
TauSelection select_tau(const ScatterStats& stats, const TauGrid& grid, const EcmConfig& config,
                        const TauSelectOptions& options = {});

} // namespace ghs
