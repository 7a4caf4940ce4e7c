#include "ghsnet/joint.hpp"

#include "ecm_engine.hpp"
#include "ghsnet/model.hpp"
#include "ghsnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ghs {

namespace {

std::vector<ScatterStats> stats_of(const std::vector<Dataset>& datasets) {
    std::vector<ScatterStats> out;
    out.reserve(datasets.size());
    for (const auto& d : datasets) out.push_back(d.stats());
    return out;
}

std::string network_tag(std::size_t k) { return "network " + std::to_string(k + 1) + ": "; }

} // namespace

JointProblem::JointProblem(std::vector<ScatterStats> stats, std::vector<double> tau_sqs)
    : stats_(std::move(stats)), tau_sqs_(std::move(tau_sqs)) {
    if (stats_.empty()) throw ContractError("joint problem needs at least one network");
    if (tau_sqs_.size() != stats_.size()) {
        throw ContractError("joint problem has " + std::to_string(stats_.size()) + " networks but " +
                            std::to_string(tau_sqs_.size()) + " tau values");
    }
    const Index p = stats_.front().p();
    for (std::size_t k = 0; k < stats_.size(); ++k) {
        if (stats_[k].p() != p || stats_[k].scatter.cols() != p) {
            throw ContractError(network_tag(k) + "all networks must share the same p");
        }
        if (stats_[k].n < 1) throw ContractError(network_tag(k) + "n must be positive");
        if (!(tau_sqs_[k] > 0.0) || !std::isfinite(tau_sqs_[k])) {
            throw ContractError(network_tag(k) + "tau^2 must be finite and > 0");
        }
    }
    if (p < 2) throw ContractError("joint problem needs p >= 2");
}

JointProblem::JointProblem(const std::vector<Dataset>& datasets, std::vector<double> tau_sqs)
    : JointProblem(stats_of(datasets), std::move(tau_sqs)) {}

LatentSummary e_step_joint(const std::vector<Matrix>& lambda_sqs, MomentMode mode) {
    if (lambda_sqs.empty()) throw ContractError("e_step_joint needs at least one scale matrix");
    const Index p = lambda_sqs.front().rows();
    for (const auto& l : lambda_sqs) {
        if (l.rows() != p || l.cols() != p) throw ContractError("e_step_joint: scale matrices differ in shape");
    }
    const double k = static_cast<double>(lambda_sqs.size());
    const double shape = 0.5 * (k + 1.0);
    const double psi = digamma_half_integer(shape);
    const double numerator = mode == MomentMode::PaperPrinted ? k : k + 1.0;

    LatentSummary out{Matrix::Zero(p, p), Matrix::Zero(p, p)};
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < p; ++i) {
            if (i == j) continue;
            double b = 1.0;
            for (const auto& l : lambda_sqs) {
                if (!(l(i, j) > 0.0)) throw DomainError("e_step_joint: lambda^2 must be > 0");
                b += 1.0 / l(i, j);
            }
            out.inv_nu_expect(i, j) = numerator / (2.0 * b);
            out.log_nu_expect(i, j) = std::log(b) - psi;
        }
    }
    return out;
}

LatentSummary e_step_joint(const std::vector<ScaleMatrix>& lambda_sqs, MomentMode mode) {
    std::vector<Matrix> raw;
    raw.reserve(lambda_sqs.size());
    for (const auto& l : lambda_sqs) raw.push_back(l.matrix());
    return e_step_joint(raw, mode);
}

double cm_lambda_joint(double theta_ijk, double shared_inv_nu, double tau_sq_k) {
    return cm_lambda(theta_ijk, shared_inv_nu, tau_sq_k);
}

namespace {

double per_network_terms(const Matrix& theta, const Matrix& lambda_sq, double tau_sq, const ScatterStats& s) {
    const Index p = theta.rows();
    double q = 0.5 * s.n * log_det_pd(theta) - 0.5 * s.scatter.cwiseProduct(theta).sum();
    for (Index j = 1; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            const double l2 = lambda_sq(i, j);
            q += -2.0 * std::log(l2) - theta(i, j) * theta(i, j) / (2.0 * tau_sq * l2);
        }
    }
    return q;
}

double inverse_scale_sum(const std::vector<Matrix>& lambda_sqs, Index i, Index j) {
    double b = 1.0;
    for (const auto& l : lambda_sqs) b += 1.0 / l(i, j);
    return b;
}

void check_shapes(const std::vector<Matrix>& thetas, const std::vector<Matrix>& lambda_sqs,
                  const JointProblem& problem) {
    if (thetas.size() != problem.k() || lambda_sqs.size() != problem.k()) {
        throw ContractError("joint objective: expected one theta and one scale matrix per network");
    }
    for (std::size_t k = 0; k < problem.k(); ++k) {
        if (thetas[k].rows() != problem.p() || lambda_sqs[k].rows() != problem.p()) {
            throw ContractError(network_tag(k) + "dimension mismatch");
        }
    }
}

} // namespace

double joint_objective_value(const std::vector<Matrix>& thetas, const std::vector<Matrix>& lambda_sqs,
                             const LatentSummary& latent, const JointProblem& problem) {
    check_shapes(thetas, lambda_sqs, problem);
    double q = 0.0;
    for (std::size_t k = 0; k < problem.k(); ++k) {
        q += per_network_terms(thetas[k], lambda_sqs[k], problem.tau_sq(k), problem.stats(k));
    }
    const double shape = 0.5 * (static_cast<double>(problem.k()) + 3.0);
    for (Index j = 1; j < problem.p(); ++j) {
        for (Index i = 0; i < j; ++i) {
            q += -shape * latent.log_nu_expect(i, j) -
                 inverse_scale_sum(lambda_sqs, i, j) * latent.inv_nu_expect(i, j);
        }
    }
    return q;
}

double joint_log_posterior(const std::vector<Matrix>& thetas, const std::vector<Matrix>& lambda_sqs,
                           const JointProblem& problem) {
    check_shapes(thetas, lambda_sqs, problem);
    double lp = 0.0;
    for (std::size_t k = 0; k < problem.k(); ++k) {
        lp += per_network_terms(thetas[k], lambda_sqs[k], problem.tau_sq(k), problem.stats(k));
    }
    const double shape = 0.5 * (static_cast<double>(problem.k()) + 1.0);
    for (Index j = 1; j < problem.p(); ++j)
        for (Index i = 0; i < j; ++i) lp -= shape * std::log(inverse_scale_sum(lambda_sqs, i, j));
    return lp;
}

JointFit fit_joint(const JointProblem& problem, const EcmConfig& config, const JointOptions& options) {
    config.validate();
    if (config.tau_mode != TauMode::Fixed) throw ContractError("fit_joint needs tau_mode = Fixed");
    const std::size_t K = problem.k();
    const Index p = problem.p();
    if (!options.warm_starts.empty() && options.warm_starts.size() != K) {
        throw ContractError("fit_joint: need one warm start per network");
    }

    std::vector<detail::NetworkState> nets;
    nets.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        try {
            for (Index j = 0; j < p; ++j) {
                if (!(problem.stats(k).scatter(j, j) > 0.0)) {
                    throw DomainError("column " + std::to_string(j) + " has zero scatter");
                }
            }
            std::optional<WarmStart> warm;
            if (!options.warm_starts.empty()) warm = options.warm_starts[k];
            auto [theta0, lambda0] = detail::initial_point(p, warm);
            nets.emplace_back(problem.stats(k), std::move(theta0), std::move(lambda0), problem.tau_sq(k));
        } catch (const DomainError& e) {
            throw DomainError(network_tag(k) + e.what());
        } catch (const ContractError& e) {
            throw ContractError(network_tag(k) + e.what());
        }
    }

    auto thetas = [&] {
        std::vector<Matrix> out;
        for (const auto& n : nets) out.push_back(n.precision.theta);
        return out;
    };
    auto lambdas = [&] {
        std::vector<Matrix> out;
        for (const auto& n : nets) out.push_back(n.lambda_sq);
        return out;
    };

    JointFit result;
    std::vector<std::vector<double>> network_traces(K);
    std::vector<double> changes(K, 0.0);
    LatentSummary latent;
    int iteration = 0;
    while (iteration < config.max_iter) {
        ++iteration;
        latent = e_step_joint(lambdas(), options.moment_mode);
        const bool observe = static_cast<bool>(options.observer.on_iteration);
        const double before = observe ? joint_objective_value(thetas(), lambdas(), latent, problem) : 0.0;

        parallel_for(K, options.threads, [&](std::size_t k) {
            try {
                const Matrix theta_prev = nets[k].precision.theta;
                detail::lambda_sweep(nets[k], latent.inv_nu_expect);
                detail::theta_sweep(nets[k], iteration, options.observer, config.epsilon_eig);
                changes[k] = detail::max_abs_diff(nets[k].precision.theta, theta_prev);
            } catch (const DomainError& e) {
                throw DomainError(network_tag(k) + e.what());
            }
        });

        for (std::size_t k = 0; k < K; ++k) network_traces[k].push_back(detail::network_terms(nets[k]));
        result.objective_trace.push_back(joint_log_posterior(thetas(), lambdas(), problem));
        if (observe) {
            options.observer.on_iteration(iteration, before,
                                          joint_objective_value(thetas(), lambdas(), latent, problem));
        }
        if (std::all_of(changes.begin(), changes.end(), [&](double c) { return c < config.tol; })) {
            result.converged = true;
            break;
        }
    }

    result.iterations = iteration;
    result.shared_inv_nu = latent.inv_nu_expect;
    for (std::size_t k = 0; k < K; ++k) {
        result.fits.push_back(EcmFit{PrecisionMatrix(nets[k].precision.theta), ScaleMatrix(nets[k].lambda_sq),
                                     GlobalScale(nets[k].tau_sq), iteration, result.converged,
                                     std::move(network_traces[k]),
                                     std::vector<double>(static_cast<std::size_t>(iteration), nets[k].tau_sq)});
    }
    return result;
}

} // namespace ghs
