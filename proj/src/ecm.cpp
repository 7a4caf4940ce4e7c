#include "ghsnet/ecm.hpp"

#include "ecm_engine.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ghs {

EcmConfig EcmConfig::fixed(double tau_sq) {
    EcmConfig c;
    c.tau_sq = tau_sq;
    return c;
}

EcmConfig EcmConfig::updated(double initial_tau_sq) {
    EcmConfig c;
    c.tau_mode = TauMode::Updated;
    c.tau_sq = initial_tau_sq;
    return c;
}

void EcmConfig::validate() const {
    if (!(tol > 0.0)) throw ContractError("tol must be > 0");
    if (max_iter < 1) throw ContractError("max_iter must be >= 1");
    if (!(tau_sq > 0.0) || !std::isfinite(tau_sq)) throw ContractError("tau_sq must be finite and > 0");
    if (!(epsilon_eig > 0.0)) throw ContractError("epsilon_eig must be > 0");
}

PrecisionState::PrecisionState(Matrix theta_init) : theta(std::move(theta_init)) { refresh_inverse(); }

void PrecisionState::refresh_inverse(double min_pivot) {
    Eigen::LLT<Matrix> llt(theta);
    if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().minCoeff() > min_pivot)) {
        throw DomainError("precision iterate lost positive definiteness");
    }
    sigma = llt.solve(Matrix::Identity(theta.rows(), theta.cols()));
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
}

LatentSummary e_step_single(const Matrix& lambda_sq) {
    const Index p = lambda_sq.rows();
    LatentSummary out{Matrix::Zero(p, p), Matrix::Zero(p, p)};
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < p; ++i) {
            if (i == j) continue;
            const double l2 = lambda_sq(i, j);
            if (!(l2 > 0.0)) throw DomainError("e_step_single: lambda^2 must be > 0");
            out.inv_nu_expect(i, j) = l2 / (l2 + 1.0);
            out.log_nu_expect(i, j) = std::log1p(1.0 / l2) + kEulerGamma;
        }
    }
    return out;
}

LatentSummary e_step_single(const ScaleMatrix& lambda_sq) { return e_step_single(lambda_sq.matrix()); }

double cm_lambda(double theta_ij, double inv_nu, double tau_sq) {
    return 0.5 * (inv_nu + theta_ij * theta_ij / (2.0 * tau_sq));
}

void cm_theta_column(PrecisionState& state, const Matrix& lambda_sq, double tau_sq,
                     const ScatterStats& stats, Index col) {
    const Index p = state.theta.rows();
    if (col < 0 || col >= p) throw ContractError("cm_theta_column: column out of range");
    const double s_jj = stats.scatter(col, col);
    if (!(s_jj > 0.0)) {
        throw DomainError("cm_theta_column: non-positive scatter diagonal in column " + std::to_string(col));
    }

    std::vector<Index> others;
    others.reserve(static_cast<std::size_t>(p - 1));
    for (Index k = 0; k < p; ++k)
        if (k != col) others.push_back(k);

    // Theta_{-j,-j}^{-1} = Sigma_{-j,-j} - sigma_{-j,j} sigma_{-j,j}^T / sigma_jj
    const Vector sigma_col = state.sigma(others, col);
    Matrix rest_inv = state.sigma(others, others);
    rest_inv.noalias() -= sigma_col * sigma_col.transpose() / state.sigma(col, col);

    Matrix system = s_jj * rest_inv;
    for (Index k = 0; k < p - 1; ++k) system(k, k) += 1.0 / (lambda_sq(others[k], col) * tau_sq);
    Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success) throw DomainError("cm_theta_column: singular column system");
    const Vector s_col = stats.scatter(others, col);
    const Vector theta_col = -llt.solve(s_col);

    const Vector u = rest_inv * theta_col;
    const double gamma = static_cast<double>(stats.n) / s_jj;
    const double theta_jj = theta_col.dot(u) + gamma;

    for (Index k = 0; k < p - 1; ++k) {
        state.theta(others[k], col) = theta_col(k);
        state.theta(col, others[k]) = theta_col(k);
    }
    state.theta(col, col) = theta_jj;

    // Block inverse of the updated matrix.
    rest_inv.noalias() += u * u.transpose() / gamma;
    state.sigma(others, others) = rest_inv;
    for (Index k = 0; k < p - 1; ++k) {
        state.sigma(others[k], col) = -u(k) / gamma;
        state.sigma(col, others[k]) = -u(k) / gamma;
    }
    state.sigma(col, col) = 1.0 / gamma;
}

double cm_tau_update(const Matrix& theta, const Matrix& lambda_sq, double tau_sq_prev) {
    if (!(tau_sq_prev > 0.0)) throw DomainError("cm_tau_update: tau_sq_prev must be > 0");
    const Index p = theta.rows();
    double weighted = 0.0;
    for (Index j = 1; j < p; ++j)
        for (Index i = 0; i < j; ++i) weighted += theta(i, j) * theta(i, j) / lambda_sq(i, j);
    const double tau_star = tau_sq_prev / (tau_sq_prev + 1.0);
    const double pp = static_cast<double>(p);
    return (2.0 * weighted + 4.0 * tau_star) / (pp * (pp - 1.0) + 6.0);
}

namespace detail {

namespace {
constexpr double kMinScaleProduct = 1e-300; // lower bound on lambda^2 tau^2
}

NetworkState::NetworkState(const ScatterStats& s, Matrix theta, Matrix lambda, double tau)
    : stats(&s), precision(std::move(theta)), lambda_sq(std::move(lambda)), tau_sq(tau) {}

std::pair<Matrix, Matrix> initial_point(Index p, const std::optional<WarmStart>& warm) {
    if (!warm) return {Matrix::Identity(p, p), Matrix::Ones(p, p)};
    if (warm->theta.rows() != p || warm->lambda_sq.rows() != p) {
        throw ContractError("warm start has the wrong dimension");
    }
    PrecisionMatrix checked(warm->theta);
    ScaleMatrix scales(warm->lambda_sq);
    return {checked.matrix(), scales.matrix()};
}

void lambda_sweep(NetworkState& net, const Matrix& inv_nu) {
    const Index p = net.p();
    const double floor = std::max(kMinScaleProduct / net.tau_sq, std::numeric_limits<double>::min());
    for (Index j = 1; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            // Null edges halve their scale every iteration; the floor keeps them off
            // zero and keeps 1/(lambda^2 tau^2) finite.
            const double l2 = std::max(cm_lambda(net.precision.theta(i, j), inv_nu(i, j), net.tau_sq), floor);
            net.lambda_sq(i, j) = l2;
            net.lambda_sq(j, i) = l2;
        }
    }
}

void theta_sweep(NetworkState& net, int iteration, const FitObserver& observer, double min_pivot) {
    for (Index col = 0; col < net.p(); ++col) {
        cm_theta_column(net.precision, net.lambda_sq, net.tau_sq, *net.stats, col);
        if (observer.on_column) observer.on_column(iteration, col, net.precision.theta);
    }
    net.precision.refresh_inverse(min_pivot);
}

double network_terms(const NetworkState& net) {
    const Matrix& theta = net.precision.theta;
    const Index p = net.p();
    double q = 0.5 * net.stats->n * log_det_pd(theta) - 0.5 * net.stats->scatter.cwiseProduct(theta).sum();
    for (Index j = 1; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            const double l2 = net.lambda_sq(i, j);
            q += -2.0 * std::log(l2) - theta(i, j) * theta(i, j) / (2.0 * net.tau_sq * l2);
        }
    }
    return q;
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace detail

namespace {

double single_objective(const detail::NetworkState& net, const LatentSummary& latent,
                        const EcmConfig& config, double tau_sq_prev) {
    double q = objective_value(net.precision.theta, net.lambda_sq, latent, net.tau_sq, net.stats->scatter,
                               net.stats->n);
    if (config.tau_mode == TauMode::Updated) q += tau_objective_terms(net.p(), net.tau_sq, tau_sq_prev);
    return q;
}

double single_log_posterior(const detail::NetworkState& net, const EcmConfig& config) {
    double lp = log_posterior(net.precision.theta, net.lambda_sq, net.tau_sq, net.stats->scatter, net.stats->n);
    if (config.tau_mode == TauMode::Updated) lp += tau_log_prior_terms(net.p(), net.tau_sq);
    return lp;
}

} // namespace

EcmFit fit_single(const ScatterStats& stats, const EcmConfig& config, const FitOptions& options) {
    config.validate();
    const Index p = stats.p();
    if (p < 2 || stats.scatter.cols() != p) throw ContractError("fit_single: scatter must be square, p >= 2");
    for (Index j = 0; j < p; ++j) {
        if (!(stats.scatter(j, j) > 0.0)) {
            throw DomainError("fit_single: column " + std::to_string(j) + " has zero scatter");
        }
    }

    auto [theta0, lambda0] = detail::initial_point(p, options.warm_start);
    detail::NetworkState net(stats, std::move(theta0), std::move(lambda0), config.tau_sq);

    std::vector<double> trace;
    std::vector<double> tau_trace;
    bool converged = false;
    int iteration = 0;
    while (iteration < config.max_iter) {
        ++iteration;
        const double tau_prev = net.tau_sq;
        const LatentSummary latent = e_step_single(net.lambda_sq);
        const double before =
            options.observer.on_iteration ? single_objective(net, latent, config, tau_prev) : 0.0;
        const Matrix theta_prev = net.precision.theta;

        detail::lambda_sweep(net, latent.inv_nu_expect);
        detail::theta_sweep(net, iteration, options.observer, config.epsilon_eig);
        if (config.tau_mode == TauMode::Updated) {
            net.tau_sq = cm_tau_update(net.precision.theta, net.lambda_sq, tau_prev);
        }

        trace.push_back(single_log_posterior(net, config));
        tau_trace.push_back(net.tau_sq);
        if (options.observer.on_iteration) {
            options.observer.on_iteration(iteration, before, single_objective(net, latent, config, tau_prev));
        }

        if (detail::max_abs_diff(net.precision.theta, theta_prev) < config.tol) {
            converged = true;
            break;
        }
    }

    return EcmFit{PrecisionMatrix(net.precision.theta), ScaleMatrix(net.lambda_sq), GlobalScale(net.tau_sq),
                  iteration, converged, std::move(trace), std::move(tau_trace)};
}

EcmFit fit_single(const Dataset& data, const EcmConfig& config, const FitOptions& options) {
    return fit_single(data.stats(), config, options);
}

} // namespace ghs
