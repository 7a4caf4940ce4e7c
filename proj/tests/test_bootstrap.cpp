#include "oracles.hpp"

#include "ghsnet/bootstrap.hpp"
#include "ghsnet/simulate.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace ghs;

TEST_CASE("equal weights reproduce the plain scatter") {
    std::mt19937_64 rng(1);
    const Matrix x = oracle::random_normal(40, 5, rng);
    const Vector w = Vector::Constant(40, 1.0 / 40.0);
    const Matrix s = x.transpose() * x;
    CHECK((weighted_scatter(x, w) - s).cwiseAbs().maxCoeff() < 1e-12 * s.cwiseAbs().maxCoeff());
}

TEST_CASE("weighted scatter for two observations by hand") {
    Matrix x(2, 2);
    x << 1.0, 2.0, -3.0, 0.5;
    Vector w(2);
    w << 0.75, 0.25;
    // (n - 1) / (1 - 0.625) = 8/3, so S = 2 a a^T + (2/3) b b^T
    const Vector a = x.row(0).transpose();
    const Vector b = x.row(1).transpose();
    const Matrix expected = 2.0 * a * a.transpose() + (2.0 / 3.0) * b * b.transpose();
    CHECK((weighted_scatter(x, w) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("weighted scatter contracts") {
    const Matrix x = Matrix::Ones(3, 2);
    CHECK_THROWS_AS(weighted_scatter(x, Vector::Constant(2, 0.5)), ContractError);
    Vector neg(3);
    neg << 1.2, -0.1, -0.1;
    CHECK_THROWS_AS(weighted_scatter(x, neg), ContractError);
    CHECK_THROWS_AS(weighted_scatter(x, Vector::Constant(3, 0.5)), ContractError);
    Vector point(3);
    point << 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(weighted_scatter(x, point), DomainError);
}

TEST_CASE("flat Dirichlet draws") {
    Rng rng = make_rng(3, Stream::Bootstrap);
    Vector mean = Vector::Zero(6);
    const int draws = 20000;
    std::mt19937_64 data_rng(2);
    const Matrix x = oracle::random_normal(6, 3, data_rng);
    for (int k = 0; k < draws; ++k) {
        const Vector w = dirichlet_flat(6, rng);
        CHECK(std::abs(w.sum() - 1.0) < 1e-14);
        CHECK((w.array() > 0.0).all());
        mean += w;
        if (k < 100) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(weighted_scatter(x, w), Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues()(0) > -1e-12);
        }
    }
    mean /= draws;
    // Var(w_i) = (n - 1) / (n^2 (n + 1)), about 0.0198 for n = 6
    CHECK((mean.array() - 1.0 / 6.0).abs().maxCoeff() < 5.0 * std::sqrt(0.0198 / draws));
    CHECK_THROWS_AS(dirichlet_flat(0, rng), ContractError);
}

TEST_CASE("type-7 quantile") {
    CHECK(empirical_quantile({1, 2, 3, 4}, 0.95) == doctest::Approx(3.85).epsilon(1e-14));
    CHECK(empirical_quantile({4, 1, 3, 2}, 0.5) == doctest::Approx(2.5));
    CHECK(empirical_quantile({7}, 0.3) == 7.0);
    CHECK(empirical_quantile({1, 2, 3}, 0.0) == 1.0);
    CHECK(empirical_quantile({1, 2, 3}, 1.0) == 3.0);
    CHECK_THROWS_AS(empirical_quantile({}, 0.5), ContractError);
    CHECK_THROWS_AS(empirical_quantile({1.0}, 1.5), ContractError);
}

TEST_CASE("bootstrap edge check") {
    const TrueModel model = make_true_model(8, {0.3, 0.4}, 5);
    const Dataset data = sample_gaussian(model, 120, 6);
    const EcmConfig config = EcmConfig::fixed(0.5);
    const EcmFit fit = fit_single(data, config);
    const std::vector<Edge> edges = edge_list(model.adjacency);

    BootstrapOptions opts;
    opts.samples = 50;
    opts.seed = 11;
    const BootstrapReport r1 = bootstrap_edge_check(data, fit.theta, edges, config, opts);
    CHECK(r1.per_edge.size() == edges.size());
    CHECK(r1.samples == 50);
    CHECK(r1.failed == 0);
    int exceeding = 0;
    for (const EdgeCheck& e : r1.per_edge) {
        CHECK(e.percentile >= 0.0);
        CHECK(e.exceeds == (std::abs(e.joint_scaled) > e.percentile));
        exceeding += e.exceeds;
    }
    CHECK(r1.exceed_fraction == doctest::Approx(static_cast<double>(exceeding) / static_cast<double>(edges.size())));

    opts.threads = 3;
    const BootstrapReport r2 = bootstrap_edge_check(data, fit.theta, edges, config, opts);
    for (std::size_t k = 0; k < edges.size(); ++k) CHECK(r1.per_edge[k].percentile == r2.per_edge[k].percentile);

    opts.level = 0.99;
    const BootstrapReport r3 = bootstrap_edge_check(data, fit.theta, edges, config, opts);
    for (std::size_t k = 0; k < edges.size(); ++k) CHECK(r3.per_edge[k].percentile >= r1.per_edge[k].percentile);
    CHECK(r3.exceed_fraction <= r1.exceed_fraction);

    std::ostringstream table;
    print_report(table, r1);
    CHECK(table.str().find("V1") != std::string::npos);

    BootstrapOptions few = opts;
    few.samples = 49;
    CHECK_THROWS_AS(bootstrap_edge_check(data, fit.theta, edges, config, few), ContractError);
    CHECK_THROWS_AS(bootstrap_edge_check(data, fit.theta, {}, config, opts), ContractError);
    CHECK_THROWS_AS(bootstrap_edge_check(data, fit.theta, {{0, 0}}, config, opts), ContractError);
    CHECK_THROWS_AS(bootstrap_edge_check(data, fit.theta, {{0, 8}}, config, opts), ContractError);
}
