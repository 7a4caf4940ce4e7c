#include "ghsnet/bootstrap.hpp"

#include "ghsnet/model.hpp"
#include "ghsnet/parallel.hpp"

#include <boost/random/exponential_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace ghs {

Vector dirichlet_flat(Index n, Rng& rng) {
    if (n < 1) throw ContractError("dirichlet_flat needs n >= 1");
    boost::random::exponential_distribution<double> expo(1.0);
    Vector w(n);
    for (Index i = 0; i < n; ++i) w(i) = expo(rng);
    return w / w.sum();
}

Matrix weighted_scatter(const Matrix& x, const Vector& weights) {
    const Index n = x.rows();
    if (weights.size() != n) throw ContractError("weighted_scatter: need one weight per observation");
    if ((weights.array() < 0.0).any()) throw ContractError("weighted_scatter: weights must be nonnegative");
    if (std::abs(weights.sum() - 1.0) > 1e-12) throw ContractError("weighted_scatter: weights must sum to 1");
    const double sum_sq = weights.squaredNorm();
    if (!(1.0 - sum_sq > 0.0)) throw DomainError("weighted_scatter: degenerate weights (sum of squares is 1)");
    const Matrix xw = weights.cwiseSqrt().asDiagonal() * x;
    Matrix s = (static_cast<double>(n - 1) / (1.0 - sum_sq)) * (xw.transpose() * xw);
    return 0.5 * (s + s.transpose());
}

Matrix weighted_scatter(const Dataset& data, const Vector& weights) {
    return weighted_scatter(data.observations(), weights);
}

double empirical_quantile(std::vector<double> values, double level) {
    if (values.empty()) throw ContractError("quantile of an empty sample");
    if (!(level >= 0.0 && level <= 1.0)) throw ContractError("quantile level must be in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = level * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BootstrapReport bootstrap_edge_check(const Dataset& data, const PrecisionMatrix& joint_theta,
                                     const std::vector<Edge>& edges, const EcmConfig& config,
                                     const BootstrapOptions& options) {
    if (options.samples < 50) throw ContractError("bootstrap check needs at least 50 samples");
    if (edges.empty()) throw ContractError("bootstrap check needs a non-empty edge list");
    if (joint_theta.p() != data.p()) throw ContractError("joint estimate and data differ in p");
    for (const Edge& e : edges) {
        if (e.i < 0 || e.j < 0 || e.i >= data.p() || e.j >= data.p() || e.i == e.j) {
            throw ContractError("bootstrap check: invalid edge");
        }
    }

    const auto B = static_cast<std::size_t>(options.samples);
    std::vector<std::optional<Vector>> draws(B);
    parallel_for(B, options.threads, [&](std::size_t b) {
        Rng rng = make_rng(mix_seed(options.seed + b), Stream::Bootstrap);
        const Vector w = dirichlet_flat(data.n(), rng);
        try {
            const EcmFit fit = fit_single(ScatterStats{weighted_scatter(data, w), data.n()}, config);
            if (!fit.converged) return;
            Vector scaled(static_cast<Index>(edges.size()));
            for (std::size_t e = 0; e < edges.size(); ++e) {
                scaled(static_cast<Index>(e)) = std::abs(scaled_element(fit.theta.matrix(), edges[e].i, edges[e].j));
            }
            draws[b] = std::move(scaled);
        } catch (const DomainError&) {
            // counted as a failed sample below
        }
    });

    BootstrapReport report;
    report.samples = options.samples;
    report.level = options.level;
    report.failed = static_cast<int>(std::count_if(draws.begin(), draws.end(), [](const auto& d) { return !d; }));
    if (report.failed > options.max_failure_fraction * options.samples) {
        std::ostringstream msg;
        msg << "bootstrap check: " << report.failed << " of " << options.samples << " samples failed";
        throw DomainError(msg.str());
    }

    std::size_t exceeding = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        std::vector<double> values;
        for (const auto& d : draws)
            if (d) values.push_back((*d)(static_cast<Index>(e)));
        const double joint = scaled_element(joint_theta.matrix(), edges[e].i, edges[e].j);
        const double q = empirical_quantile(std::move(values), options.level);
        const bool exceeds = std::abs(joint) > q;
        exceeding += exceeds;
        report.per_edge.push_back({edges[e].i, edges[e].j, joint, q, exceeds});
    }
    report.exceed_fraction = static_cast<double>(exceeding) / static_cast<double>(edges.size());
    return report;
}

void print_report(std::ostream& out, const BootstrapReport& report, const std::vector<std::string>& names) {
    auto label = [&](Index k) {
        const auto u = static_cast<std::size_t>(k);
        return u < names.size() ? names[u] : "V" + std::to_string(k + 1);
    };
    std::ostringstream head;
    head << "q" << std::lround(100.0 * report.level);
    out << std::left << std::setw(20) << "edge" << std::right << std::setw(12) << "estimate" << std::setw(12)
        << head.str() << '\n';
    for (const EdgeCheck& e : report.per_edge) {
        out << std::left << std::setw(20) << (label(e.i) + "-" + label(e.j)) << std::right << std::fixed
            << std::setprecision(4) << std::setw(12) << e.joint_scaled << std::setw(12) << e.percentile
            << (e.exceeds ? " *" : "") << '\n';
    }
    out << std::defaultfloat << "exceeding: " << std::setprecision(3) << 100.0 * report.exceed_fraction << "% of "
        << report.per_edge.size() << " edges (" << report.samples - report.failed << " of " << report.samples
        << " samples used)\n";
}

} // namespace ghs
