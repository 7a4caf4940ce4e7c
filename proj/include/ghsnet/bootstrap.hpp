#pragma once

#include "ghsnet/ecm.hpp"
#include "ghsnet/rng.hpp"
#include "ghsnet/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ghs {

struct EdgeCheck {
    Index i;
    Index j;
    double joint_scaled;  ///< theta_ij / sqrt(theta_ii theta_jj) from the joint fit
    double percentile;    ///< empirical quantile of |bootstrap scaled element|
    bool exceeds;         ///< |joint_scaled| > percentile
};

struct BootstrapReport {
    std::vector<EdgeCheck> per_edge;
    double exceed_fraction = 0.0;
    int samples = 0;        ///< B requested
    int failed = 0;         ///< samples excluded because the fit failed or did not converge
    double level = 0.95;
};

struct BootstrapOptions {
    int samples = 100;
    double level = 0.95;
    double max_failure_fraction = 0.2;
    int threads = 1;
    std::uint64_t seed = 1;
};

/// Flat Dirichlet draw of length n, as normalised unit-rate exponentials.
Vector dirichlet_flat(Index n, Rng& rng);

/**
 * (n - 1) / (1 - sum w_i^2) * X_w^T X_w where row i of X_w is sqrt(w_i) x_i.
 * Uniform weights give X^T X. X is used as stored (already centred for a Dataset).
 */
Matrix weighted_scatter(const Matrix& x, const Vector& weights);
Matrix weighted_scatter(const Dataset& data, const Vector& weights);

/// Linear-interpolation sample quantile (the usual "type 7" definition).
double empirical_quantile(std::vector<double> values, double level);

/**
 * Bayesian-bootstrap check of joint estimates: for each of B Dirichlet
 * weightings a single-network fit is run on the weighted scatter at the fixed
 * tau^2 in `config`; an edge is flagged when the joint scaled element exceeds
 * the `level` quantile of the bootstrap absolute values.
 */
BootstrapReport bootstrap_edge_check(const Dataset& data, const PrecisionMatrix& joint_theta,
                                     const std::vector<Edge>& edges, const EcmConfig& config,
                                     const BootstrapOptions& options = {});

/// Edge / estimate / quantile table; exceeding edges are marked with '*'.
void print_report(std::ostream& out, const BootstrapReport& report, const std::vector<std::string>& names = {});

} // namespace ghs
