#include "ghsnet/model.hpp"

#include <cmath>
#include <numbers>

namespace ghs {

double digamma_half_integer(double x) {
    const double twice = 2.0 * x;
    if (!(x > 0.0) || std::abs(twice - std::round(twice)) > 1e-12) {
        throw DomainError("digamma_half_integer needs a positive integer or half-integer");
    }
    double base = 1.0;
    double value = -kEulerGamma;
    if (static_cast<long>(std::round(twice)) % 2 != 0) {
        base = 0.5;
        value = -kEulerGamma - 2.0 * std::numbers::ln2;
    }
    for (double z = base; z < x - 0.25; z += 1.0) value += 1.0 / z;
    return value;
}

Matrix partial_correlations(const Matrix& theta) {
    const Index p = theta.rows();
    Vector inv_sqrt(p);
    for (Index i = 0; i < p; ++i) {
        if (!(theta(i, i) > 0.0)) throw DomainError("precision matrix has a non-positive diagonal");
        inv_sqrt(i) = 1.0 / std::sqrt(theta(i, i));
    }
    Matrix rho(p, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < p; ++i) rho(i, j) = -theta(i, j) * inv_sqrt(i) * inv_sqrt(j);
        rho(j, j) = 1.0;
    }
    return 0.5 * (rho + rho.transpose());
}

Matrix partial_correlations(const PrecisionMatrix& theta) { return partial_correlations(theta.matrix()); }

double scaled_element(const Matrix& theta, Index i, Index j) {
    return theta(i, j) / std::sqrt(theta(i, i) * theta(j, j));
}

GraphEstimate extract_graph(const PrecisionMatrix& theta, double threshold) {
    if (!(threshold >= 0.0)) throw ContractError("edge threshold must be >= 0");
    GraphEstimate out;
    out.partial_correlations = partial_correlations(theta);
    const Index p = theta.p();
    out.adjacency = BoolMatrix::Constant(p, p, false);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < p; ++i)
            if (i != j && std::abs(out.partial_correlations(i, j)) > threshold) out.adjacency(i, j) = true;
    out.sparsity = sparsity_of(out.adjacency);
    return out;
}

double log_det_pd(const Matrix& m) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) throw DomainError("log det requested for a non-PD matrix");
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double objective_value(const Matrix& theta, const Matrix& lambda_sq, const LatentSummary& latent,
                       double tau_sq, const Matrix& scatter, int n) {
    const Index p = theta.rows();
    double q = 0.5 * n * log_det_pd(theta) - 0.5 * (scatter.cwiseProduct(theta)).sum();
    for (Index j = 1; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            const double l2 = lambda_sq(i, j);
            const double t = theta(i, j);
            q += -2.0 * std::log(l2) - t * t / (2.0 * tau_sq * l2) - 2.0 * latent.log_nu_expect(i, j) -
                 (1.0 / l2 + 1.0) * latent.inv_nu_expect(i, j);
        }
    }
    return q;
}

double objective_value(const PrecisionMatrix& theta, const ScaleMatrix& lambda_sq,
                       const LatentSummary& latent, GlobalScale tau_sq, const Dataset& data) {
    if (theta.p() != data.p() || lambda_sq.p() != data.p() || latent.inv_nu_expect.rows() != data.p()) {
        throw ContractError("objective_value: dimension mismatch");
    }
    return objective_value(theta.matrix(), lambda_sq.matrix(), latent, tau_sq.value(), data.scatter(),
                           data.n());
}

double log_posterior(const Matrix& theta, const Matrix& lambda_sq, double tau_sq, const Matrix& scatter,
                     int n) {
    const Index p = theta.rows();
    double lp = 0.5 * n * log_det_pd(theta) - 0.5 * (scatter.cwiseProduct(theta)).sum();
    for (Index j = 1; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            const double l2 = lambda_sq(i, j);
            const double t = theta(i, j);
            lp += -std::log(l2) - std::log1p(l2) - t * t / (2.0 * tau_sq * l2);
        }
    }
    return lp;
}

double tau_log_prior_terms(Index p, double tau_sq) {
    const double pairs = 0.5 * static_cast<double>(p) * static_cast<double>(p - 1);
    return -(0.5 * pairs + 0.5) * std::log(tau_sq) - std::log1p(tau_sq);
}

double tau_objective_terms(Index p, double tau_sq, double tau_sq_prev) {
    const double pairs = 0.5 * static_cast<double>(p) * static_cast<double>(p - 1);
    const double tau_star = tau_sq_prev / (tau_sq_prev + 1.0);
    const double log_xi = std::log1p(1.0 / tau_sq_prev) + kEulerGamma;
    return -(pairs + 3.0) * 0.5 * std::log(tau_sq) - 2.0 * log_xi - (1.0 + 1.0 / tau_sq) * tau_star;
}

} // namespace ghs
