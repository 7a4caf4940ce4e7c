#include "ghsnet/metrics.hpp"
#include "ghsnet/model.hpp"
#include "ghsnet/simulate.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <doctest.h>

#include <algorithm>
#include <array>
#include <random>
#include <vector>

using namespace ghs;

namespace {

Index max_degree(const BoolMatrix& adj) {
    Index best = 0;
    for (Index i = 0; i < adj.rows(); ++i) best = std::max<Index>(best, adj.row(i).count());
    return best;
}

bool is_connected(const BoolMatrix& adj) {
    std::vector<bool> seen(static_cast<std::size_t>(adj.rows()), false);
    std::vector<Index> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const Index v = stack.back();
        stack.pop_back();
        for (Index u = 0; u < adj.rows(); ++u) {
            if (adj(v, u) && !seen[static_cast<std::size_t>(u)]) {
                seen[static_cast<std::size_t>(u)] = true;
                stack.push_back(u);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

// Uniform random graph with the same number of edges, for comparing degree tails.
Index erdos_renyi_max_degree(Index p, std::size_t edges, std::mt19937_64& rng) {
    std::vector<Edge> pairs;
    for (Index i = 0; i < p; ++i)
        for (Index j = i + 1; j < p; ++j) pairs.push_back({i, j});
    std::shuffle(pairs.begin(), pairs.end(), rng);
    BoolMatrix adj = BoolMatrix::Constant(p, p, false);
    for (std::size_t k = 0; k < edges; ++k) adj(pairs[k].i, pairs[k].j) = adj(pairs[k].j, pairs[k].i) = true;
    return max_degree(adj);
}

Matrix off_diagonal(Matrix m) {
    m.diagonal().setZero();
    return m;
}

} // namespace

TEST_CASE("scale-free graph has p edges and the expected sparsity") {
    for (Index p : {3, 10, 50, 100, 200}) {
        const BoolMatrix adj = generate_scale_free_graph(p, 7);
        check_adjacency(adj);
        CHECK(count_edges(adj) == static_cast<std::size_t>(p));
        CHECK(is_connected(adj));
    }
    CHECK(sparsity_of(generate_scale_free_graph(50, 1)) == doctest::Approx(0.0408).epsilon(1e-3));
    CHECK(sparsity_of(generate_scale_free_graph(100, 1)) == doctest::Approx(0.0202).epsilon(1e-3));
    CHECK_THROWS_AS(generate_scale_free_graph(2, 1), ContractError);
}

TEST_CASE("scale-free graphs have heavier degree tails than uniform graphs") {
    std::mt19937_64 rng(99);
    int heavier = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const BoolMatrix adj = generate_scale_free_graph(50, seed);
        if (max_degree(adj) > erdos_renyi_max_degree(50, count_edges(adj), rng)) ++heavier;
    }
    CHECK(heavier >= 90);
}

TEST_CASE("precision on an empty graph is the identity") {
    const BoolMatrix empty = BoolMatrix::Constant(6, 6, false);
    const PrecisionMatrix theta = build_precision(empty, {0.1, 0.2}, 3);
    CHECK((theta.matrix() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("single-edge precision hits a degenerate range exactly") {
    BoolMatrix adj = BoolMatrix::Constant(4, 4, false);
    adj(1, 3) = adj(3, 1) = true;
    const PrecisionMatrix theta = build_precision(adj, {0.2, 0.2}, 5);
    const Matrix pc = partial_correlations(theta);
    CHECK(pc(1, 3) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(std::abs(pc(0, 1)) < 1e-15);
    const Matrix sigma = theta.matrix().inverse();
    CHECK((sigma.diagonal().array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("precision realises the partial-correlation range on a p=50 graph") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        const TrueModel model = make_true_model(50, {0.1, 0.2}, seed);
        const Matrix pc = partial_correlations(model.precision);
        for (Index i = 0; i < 50; ++i) {
            for (Index j = i + 1; j < 50; ++j) {
                if (model.adjacency(i, j)) {
                    CHECK(pc(i, j) >= 0.1 - 1e-12);
                    CHECK(pc(i, j) <= 0.2 + 1e-12);
                } else {
                    CHECK(std::abs(pc(i, j)) < 1e-14);
                }
            }
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(model.precision.matrix());
        CHECK(es.eigenvalues()(0) > 0.0);
        const Matrix sigma = model.precision.matrix().inverse();
        CHECK((sigma.diagonal().array() - 1.0).abs().maxCoeff() < 1e-10);
        CHECK(extract_graph(model.precision, 0.05).adjacency == model.adjacency);
    }
}

TEST_CASE("mixed sign mode produces both signs") {
    const TrueModel model = make_true_model(50, {0.1, 0.2}, 11, SignMode::Mixed);
    const Matrix pc = off_diagonal(partial_correlations(model.precision));
    CHECK(pc.maxCoeff() >= 0.1 - 1e-12);
    CHECK(pc.minCoeff() <= -0.1 + 1e-12);
    CHECK(pc.cwiseAbs().maxCoeff() <= 0.2 + 1e-12);
}

TEST_CASE("range validation") {
    const BoolMatrix adj = generate_scale_free_graph(5, 1);
    CHECK_THROWS_AS(build_precision(adj, {0.3, 0.2}, 1), ContractError);
    CHECK_THROWS_AS(build_precision(adj, {-0.1, 0.2}, 1), ContractError);
    CHECK_THROWS_AS(build_precision(adj, {0.1, 1.0}, 1), ContractError);
    BoolMatrix asym = adj;
    asym(0, 4) = !asym(0, 4);
    CHECK_THROWS_AS(build_precision(asym, {0.1, 0.2}, 1), ContractError);
}

TEST_CASE("perturbation moves the requested number of edges") {
    const TrueModel base = make_true_model(49, {0.1, 0.2}, 8);

    const TrueModel same = perturb_graph(base, 0.0, 3);
    CHECK(same.adjacency == base.adjacency);
    CHECK(edge_disagreement(same.adjacency, base.adjacency) == 0.0);

    const TrueModel all = perturb_graph(base, 1.0, 3);
    CHECK(count_edges(all.adjacency) == count_edges(base.adjacency));
    CHECK(count_edges(all.adjacency.cwiseProduct(base.adjacency)) == 0);
    CHECK(edge_disagreement(all.adjacency, base.adjacency) == 1.0);

    const TrueModel part = perturb_graph(base, 0.4, 3);
    CHECK(count_edges(part.adjacency) == 49);
    CHECK(count_edges(part.adjacency.cwiseProduct(base.adjacency)) == 29);
    CHECK(edge_disagreement(part.adjacency, base.adjacency) == doctest::Approx(20.0 / 49.0).epsilon(1e-12));

    const Matrix pc = partial_correlations(part.precision);
    for (Index i = 0; i < 49; ++i)
        for (Index j = i + 1; j < 49; ++j)
            if (part.adjacency(i, j)) CHECK((pc(i, j) >= 0.1 - 1e-12 && pc(i, j) <= 0.2 + 1e-12));

    CHECK_THROWS_AS(perturb_graph(base, 1.5, 1), ContractError);
    CHECK_THROWS_AS(perturb_graph(base, -0.1, 1), ContractError);
}

TEST_CASE("perturbation picks removed and added edges uniformly") {
    const TrueModel base = make_true_model(5, {0.1, 0.2}, 4);
    REQUIRE(count_edges(base.adjacency) == 5);
    const std::vector<Edge> edges = edge_list(base.adjacency);
    std::vector<Edge> non_edges;
    for (Index i = 0; i < 5; ++i)
        for (Index j = i + 1; j < 5; ++j)
            if (!base.adjacency(i, j)) non_edges.push_back({i, j});
    REQUIRE(non_edges.size() == 5);

    std::array<int, 5> removed{}, added{};
    const int draws = 10000;
    for (int s = 0; s < draws; ++s) {
        const TrueModel moved = perturb_graph(base, 0.2, static_cast<std::uint64_t>(s));
        for (std::size_t k = 0; k < 5; ++k) {
            if (!moved.adjacency(edges[k].i, edges[k].j)) ++removed[k];
            if (moved.adjacency(non_edges[k].i, non_edges[k].j)) ++added[k];
        }
    }
    auto chi_square = [&](const std::array<int, 5>& counts) {
        const double expected = draws / 5.0;
        double stat = 0.0;
        for (int c : counts) stat += (c - expected) * (c - expected) / expected;
        return stat;
    };
    const double critical = boost::math::quantile(boost::math::chi_squared(4.0), 0.999);
    CHECK(chi_square(removed) < critical);
    CHECK(chi_square(added) < critical);
}

TEST_CASE("samples follow the model covariance") {
    const TrueModel model = make_true_model(5, {0.3, 0.4}, 2);
    const Dataset data = sample_gaussian(model, 100000, 17);
    const Matrix cov = data.scatter() / (data.n() - 1.0);
    const Matrix sigma = model.precision.matrix().inverse();
    CHECK((cov - sigma).cwiseAbs().maxCoeff() < 0.05);
    CHECK(data.column_means().cwiseAbs().maxCoeff() < 0.02);
    CHECK_THROWS_AS(sample_gaussian(model, 1, 1), ContractError);
}

TEST_CASE("simulation is deterministic in its seeds") {
    const TrueModel a = make_true_model(30, {0.1, 0.2}, 21);
    const TrueModel b = make_true_model(30, {0.1, 0.2}, 21);
    const TrueModel c = make_true_model(30, {0.1, 0.2}, 22);
    CHECK(a.adjacency == b.adjacency);
    CHECK(a.precision.matrix() == b.precision.matrix());
    CHECK(a.precision.matrix() != c.precision.matrix());
    CHECK(perturb_graph(a, 0.5, 4).adjacency == perturb_graph(b, 0.5, 4).adjacency);
    CHECK(sample_gaussian(a, 40, 9).observations() == sample_gaussian(b, 40, 9).observations());
    CHECK(sample_gaussian(a, 40, 9).observations() != sample_gaussian(a, 40, 10).observations());
}
