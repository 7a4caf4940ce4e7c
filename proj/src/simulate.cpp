#include "ghsnet/simulate.hpp"

#include "ghsnet/model.hpp"
#include "ghsnet/rng.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace ghs {

namespace {

constexpr double kMinEigen = 1e-6;
constexpr int kMaxRepairPasses = 50;

// Index drawn with probability proportional to weights (all nonnegative, positive sum).
Index draw_weighted(const std::vector<double>& weights, Rng& rng) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    boost::random::uniform_real_distribution<double> unif(0.0, total);
    const double u = unif(rng);
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        acc += weights[k];
        if (u < acc && weights[k] > 0.0) return static_cast<Index>(k);
    }
    for (std::size_t k = weights.size(); k-- > 0;)
        if (weights[k] > 0.0) return static_cast<Index>(k);
    return 0;
}

double min_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

/**
 * Unit-diagonal matrix P with P_ij = -rho_ij. If P is not comfortably PD the
 * magnitudes are pulled towards `low` geometrically until it is; every value
 * stays inside [low, high].
 */
Matrix partial_matrix(const Matrix& rho, PartialRange range) {
    const Index p = rho.rows();
    Matrix mag = rho.cwiseAbs();
    const Matrix sign = rho.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
    auto assemble = [&] {
        Matrix P = -(mag.cwiseProduct(sign));
        P.diagonal().setOnes();
        return P;
    };
    Matrix P = assemble();
    for (int pass = 0; pass < kMaxRepairPasses && min_eigenvalue(P) < kMinEigen; ++pass) {
        for (Index j = 0; j < p; ++j)
            for (Index i = 0; i < p; ++i)
                if (i != j && mag(i, j) > 0.0) mag(i, j) = range.low + 0.8 * (mag(i, j) - range.low);
        P = assemble();
    }
    if (min_eigenvalue(P) < kMinEigen) {
        throw DomainError("cannot realise the requested partial-correlation range on this graph");
    }
    return P;
}

// Theta = D P D with D chosen so that Theta^{-1} has unit diagonal.
PrecisionMatrix standardise(const Matrix& P) {
    Eigen::LLT<Matrix> llt(P);
    const Matrix cov = llt.solve(Matrix::Identity(P.rows(), P.cols()));
    const Vector d = cov.diagonal().cwiseSqrt();
    Matrix theta = d.asDiagonal() * P * d.asDiagonal();
    theta = 0.5 * (theta + theta.transpose()).eval();
    return PrecisionMatrix(std::move(theta));
}

void check_range(PartialRange range) {
    if (!(range.low >= 0.0) || !(range.high >= range.low) || !(range.high < 1.0)) {
        throw ContractError("partial range must satisfy 0 <= low <= high < 1");
    }
}

} // namespace

BoolMatrix generate_scale_free_graph(Index p, std::uint64_t seed) {
    if (p < 3) throw ContractError("scale-free graph needs p >= 3");
    Rng rng = make_rng(seed, Stream::Graph);
    BoolMatrix adj = BoolMatrix::Constant(p, p, false);
    std::vector<double> degree(static_cast<std::size_t>(p), 0.0);
    auto link = [&](Index a, Index b) {
        adj(a, b) = adj(b, a) = true;
        degree[static_cast<std::size_t>(a)] += 1.0;
        degree[static_cast<std::size_t>(b)] += 1.0;
    };

    link(0, 1);
    for (Index node = 2; node < p; ++node) {
        std::vector<double> w(degree.begin(), degree.begin() + node);
        link(node, draw_weighted(w, rng));
    }

    // Extra edge: first endpoint by degree, second by degree among its non-neighbours.
    for (;;) {
        const Index a = draw_weighted(degree, rng);
        std::vector<double> w = degree;
        for (Index k = 0; k < p; ++k)
            if (k == a || adj(a, k)) w[static_cast<std::size_t>(k)] = 0.0;
        if (std::any_of(w.begin(), w.end(), [](double v) { return v > 0.0; })) {
            link(a, draw_weighted(w, rng));
            break;
        }
    }
    return adj;
}

PrecisionMatrix build_precision(const BoolMatrix& adjacency, PartialRange range, std::uint64_t seed,
                                SignMode signs) {
    check_adjacency(adjacency);
    check_range(range);
    Rng rng = make_rng(seed, Stream::Precision);
    // Boost's uniform_real_distribution never returns when low == high.
    boost::random::uniform_real_distribution<double> unif(range.low, range.high > range.low ? range.high : 1.0);
    boost::random::uniform_int_distribution<int> coin(0, 1);
    const Index p = adjacency.rows();
    Matrix rho = Matrix::Zero(p, p);
    for (Index i = 0; i < p; ++i) {
        for (Index j = i + 1; j < p; ++j) {
            if (!adjacency(i, j)) continue;
            double v = range.high > range.low ? unif(rng) : range.low;
            if (signs == SignMode::Mixed && coin(rng) == 0) v = -v;
            rho(i, j) = rho(j, i) = v;
        }
    }
    return standardise(partial_matrix(rho, range));
}

TrueModel make_true_model(Index p, PartialRange range, std::uint64_t seed, SignMode signs) {
    BoolMatrix adj = generate_scale_free_graph(p, seed);
    PrecisionMatrix precision = build_precision(adj, range, seed, signs);
    return TrueModel{std::move(adj), std::move(precision), range, seed};
}

TrueModel perturb_graph(const TrueModel& model, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw ContractError("disagreement fraction must be in [0, 1]");
    const Index p = model.p();
    const std::vector<Edge> edges = edge_list(model.adjacency);
    std::vector<Edge> non_edges;
    for (Index i = 0; i < p; ++i)
        for (Index j = i + 1; j < p; ++j)
            if (!model.adjacency(i, j)) non_edges.push_back({i, j});

    const auto moved = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(edges.size())));
    if (moved > non_edges.size()) throw ContractError("not enough non-edges to reallocate into");

    Rng rng = make_rng(seed, Stream::Perturb);
    auto partial_shuffle = [&rng](auto& v, std::size_t k) {
        for (std::size_t t = 0; t < k; ++t) {
            boost::random::uniform_int_distribution<std::size_t> pick(t, v.size() - 1);
            std::swap(v[t], v[pick(rng)]);
        }
    };
    std::vector<Edge> removed = edges;
    partial_shuffle(removed, moved);
    partial_shuffle(non_edges, moved);

    const Matrix rho = partial_correlations(model.precision);
    Matrix new_rho = rho;
    new_rho.diagonal().setZero();
    BoolMatrix adj = model.adjacency;
    for (std::size_t t = 0; t < moved; ++t) {
        const Edge out = removed[t];
        const Edge in = non_edges[t];
        const double value = rho(out.i, out.j);
        adj(out.i, out.j) = adj(out.j, out.i) = false;
        new_rho(out.i, out.j) = new_rho(out.j, out.i) = 0.0;
        adj(in.i, in.j) = adj(in.j, in.i) = true;
        new_rho(in.i, in.j) = new_rho(in.j, in.i) = value;
    }
    PrecisionMatrix precision = standardise(partial_matrix(new_rho, model.partial_range));
    return TrueModel{std::move(adj), std::move(precision), model.partial_range, seed};
}

Dataset sample_gaussian(const TrueModel& model, int n, std::uint64_t seed) {
    if (n < 2) throw ContractError("sample_gaussian needs n >= 2");
    const Index p = model.p();
    Eigen::LLT<Matrix> theta_llt(model.precision.matrix());
    const Matrix cov = theta_llt.solve(Matrix::Identity(p, p));
    Eigen::LLT<Matrix> cov_llt(cov);
    const Matrix lower = cov_llt.matrixL();

    Rng rng = make_rng(seed, Stream::Sample);
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(n, p);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < p; ++c) z(r, c) = normal(rng);
    return Dataset(z * lower.transpose());
}

} // namespace ghs
