#include "ghsnet/tau_select.hpp"

#include "ghsnet/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace ghs {

TauGrid TauGrid::geometric(double low, double high, int count, double aic_epsilon) {
    if (!(low > 0.0) || !(high > low) || count < 2) {
        throw ContractError("geometric grid needs 0 < low < high and count >= 2");
    }
    TauGrid grid;
    grid.aic_epsilon = aic_epsilon;
    const double step = std::log(high / low) / (count - 1);
    for (int m = 0; m < count; ++m) grid.values.push_back(low * std::exp(step * m));
    grid.values.back() = high;
    return grid;
}

TauGrid TauGrid::standard(double aic_epsilon) { return geometric(1e-4, 10.0, 18, aic_epsilon); }

void TauGrid::validate() const {
    if (values.size() < 2) throw ContractError("tau grid needs at least two values");
    if (!(aic_epsilon > 0.0)) throw ContractError("aic_epsilon must be > 0");
    for (std::size_t m = 0; m < values.size(); ++m) {
        if (!(values[m] > 0.0) || !std::isfinite(values[m])) throw ContractError("tau grid values must be > 0");
        if (m > 0 && !(values[m] > values[m - 1])) throw ContractError("tau grid must be strictly increasing");
    }
}

double aic_score(const Matrix& theta, const ScatterStats& stats, double threshold) {
    if (theta.rows() != stats.p()) throw ContractError("aic_score: dimension mismatch");
    const double n = stats.n;
    const double trace = stats.scatter.cwiseProduct(theta).sum();
    const double log_det = log_det_pd(theta);
    const auto edges = static_cast<double>(extract_graph(PrecisionMatrix(theta), threshold).edge_count());
    return n / (n - 1.0) * trace - n * log_det + 2.0 * edges;
}

double aic_score(const EcmFit& fit, const Dataset& data, double threshold) {
    return aic_score(fit.theta.matrix(), data.stats(), threshold);
}

TauSelection select_tau(const ScatterStats& stats, const TauGrid& grid, const EcmConfig& config,
                        const TauSelectOptions& options) {
    grid.validate();
    if (config.tau_mode != TauMode::Fixed) throw ContractError("select_tau needs tau_mode = Fixed");

    std::vector<std::pair<double, double>> trace;
    std::optional<EcmFit> previous;
    double previous_aic = 0.0;
    for (std::size_t m = 0; m < grid.values.size(); ++m) {
        const double tau_sq = grid.values[m];
        EcmConfig c = config;
        c.tau_sq = tau_sq;
        FitOptions fo;
        if (previous && options.warm_start != WarmStartMode::None) {
            Matrix lambda = options.warm_start == WarmStartMode::ThetaLambda
                                ? previous->lambda_sq.matrix()
                                : Matrix::Ones(stats.p(), stats.p());
            fo.warm_start = WarmStart{previous->theta.matrix(), std::move(lambda)};
        }
        double aic = 0.0;
        try {
            previous = fit_single(stats, c, fo);
            aic = aic_score(previous->theta.matrix(), stats, options.edge_threshold);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "tau selection failed at grid point " << m << " (tau^2 = " << tau_sq << "): " << e.what();
            throw DomainError(msg.str());
        }
        trace.emplace_back(tau_sq, aic);
        const bool stable = m > 0 && std::abs(aic - previous_aic) < grid.aic_epsilon;
        if (stable || m + 1 == grid.values.size()) {
            return TauSelection{tau_sq, m, std::move(trace), stable, std::move(*previous)};
        }
        previous_aic = aic;
    }
    throw ContractError("tau grid is empty");
}

TauSelection select_tau(const Dataset& data, const TauGrid& grid, const EcmConfig& config,
                        const TauSelectOptions& options) {
    return select_tau(data.stats(), grid, config, options);
}

} // namespace ghs
