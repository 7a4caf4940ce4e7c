#pragma once

// Reference computations for the tests. Nothing here calls the library's
// closed forms: expectations come from quadrature over the prior hierarchy and
// maximisers from generic numerical search.

#include "ghsnet/types.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using ghs::Index;
using ghs::Matrix;

/// log density of InvGamma(shape, scale) at x.
inline double log_inv_gamma(double x, double shape, double scale) {
    return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

struct NuMoments {
    double inv_nu;
    double log_nu;
};

/// Maximiser of f on [lo, hi] by Brent's method.
inline double argmax_1d(const std::function<double(double)>& f, double lo, double hi) {
    const auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, lo, hi,
                                                         std::numeric_limits<double>::digits);
    return r.first;
}

/**
 * Integral of exp(log_f(t)) * h(t) over the real line, scaled by exp(-peak)
 * where peak is the maximum of log_f. Non-finite integrand values count as 0.
 */
struct LogIntegrator {
    std::function<double(double)> log_f;
    double centre = 0.0;
    double peak = 0.0;

    explicit LogIntegrator(std::function<double(double)> f) : log_f(std::move(f)) {
        centre = argmax_1d(log_f, -60.0, 60.0);
        peak = log_f(centre);
    }

    double integrate(const std::function<double(double)>& h) const {
        boost::math::quadrature::sinh_sinh<double> integrator;
        return integrator.integrate(
            [&](double u) {
                const double t = u + centre;
                const double v = std::exp(log_f(t) - peak) * h(t);
                return std::isfinite(v) ? v : 0.0;
            },
            1e-14);
    }

    /// log of the integral of exp(log_f).
    double log_integral() const {
        return peak + std::log(integrate([](double) { return 1.0; }));
    }
};

/**
 * E[1/nu] and E[log nu] under p(nu | lambda^2_1..K), built from the horseshoe
 * hierarchy nu ~ InvGamma(1/2, 1), lambda_k^2 | nu ~ InvGamma(1/2, 1/nu), by
 * quadrature in t = log nu.
 */
inline NuMoments nu_moments_by_quadrature(const std::vector<double>& lambda_sq) {
    const LogIntegrator q([&](double t) {
        const double nu = std::exp(t);
        double v = log_inv_gamma(nu, 0.5, 1.0) + t; // Jacobian of nu = e^t
        for (double l : lambda_sq) v += log_inv_gamma(l, 0.5, 1.0 / nu);
        return v;
    });
    const double z = q.integrate([](double) { return 1.0; });
    return {q.integrate([](double t) { return std::exp(-t); }) / z, q.integrate([](double t) { return t; }) / z};
}

/// Maximiser of f over x > 0, searched in log x.
inline double argmax_positive(const std::function<double(double)>& f, double lo = 1e-12, double hi = 1e12) {
    return std::exp(argmax_1d([&](double t) { return f(std::exp(t)); }, std::log(lo), std::log(hi)));
}

/// log det by Cholesky, -inf when the matrix is not PD.
inline double log_det_or_minus_inf(const Matrix& m) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const auto& l = llt.matrixLLT();
    double v = 0.0;
    for (Index i = 0; i < m.rows(); ++i) {
        if (!(l(i, i) > 0.0)) return -std::numeric_limits<double>::infinity();
        v += 2.0 * std::log(l(i, i));
    }
    return v;
}

/// Theta-dependent part of the expected complete-data log posterior (flat prior on the diagonal).
inline double theta_objective(const Matrix& theta, const Matrix& scatter, int n, const Matrix& lambda_sq,
                              double tau_sq) {
    double v = 0.5 * n * log_det_or_minus_inf(theta) - 0.5 * (scatter.cwiseProduct(theta)).sum();
    for (Index j = 0; j < theta.cols(); ++j)
        for (Index i = 0; i < j; ++i) v -= theta(i, j) * theta(i, j) / (2.0 * tau_sq * lambda_sq(i, j));
    return v;
}

/**
 * Row/column `col` of the maximiser of theta_objective with every other entry
 * held fixed, by cyclic coordinate ascent with Brent line searches.
 */
inline Matrix maximise_column(Matrix theta, const Matrix& scatter, int n, const Matrix& lambda_sq, double tau_sq,
                              Index col) {
    const Index p = theta.rows();
    auto f = [&](const Matrix& t) {
        const double v = theta_objective(t, scatter, n, lambda_sq, tau_sq);
        return std::isfinite(v) ? v : -1e300;
    };
    for (int sweep = 0; sweep < 5000; ++sweep) {
        double change = 0.0;
        for (Index r = 0; r < p; ++r) {
            const double before = theta(r, col);
            double lo, hi;
            if (r == col) {
                lo = 1e-8;
                hi = 10.0 * (theta(col, col) + 1.0) + 10.0 * n / scatter(col, col);
            } else {
                const double span = std::sqrt(theta(r, r) * theta(col, col));
                lo = -span;
                hi = span;
            }
            const double best = argmax_1d(
                [&](double x) {
                    Matrix t = theta;
                    t(r, col) = t(col, r) = x;
                    return f(t);
                },
                lo, hi);
            theta(r, col) = theta(col, r) = best;
            change = std::max(change, std::abs(best - before));
        }
        if (change < 1e-12) break;
    }
    return theta;
}

/// Symmetric PD matrix with eigenvalues in [lo, hi].
inline Matrix random_spd(Index p, std::mt19937_64& rng, double lo = 0.5, double hi = 3.0) {
    std::normal_distribution<double> normal;
    Matrix a(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) a(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix q = qr.householderQ();
    std::uniform_real_distribution<double> eig(lo, hi);
    ghs::Vector d(p);
    for (Index i = 0; i < p; ++i) d(i) = eig(rng);
    Matrix m = q * d.asDiagonal() * q.transpose();
    return 0.5 * (m + m.transpose());
}

/// n x p standard-normal draws.
inline Matrix random_normal(Index n, Index p, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Matrix x(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) x(i, j) = normal(rng);
    return x;
}

/// Symmetric matrix of log-uniform entries in [lo, hi] with unit diagonal.
inline Matrix random_scales(Index p, std::mt19937_64& rng, double lo = 1e-2, double hi = 1e2) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    Matrix m = Matrix::Ones(p, p);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < j; ++i) m(i, j) = m(j, i) = std::exp(u(rng));
    return m;
}

} // namespace oracle
