#pragma once

#include "ghsnet/ecm.hpp"
#include "ghsnet/types.hpp"

#include <optional>
#include <vector>

namespace ghs {

/// Which expectation of 1/nu the joint E-step uses.
enum class MomentMode {
    PaperPrinted,   ///< K / (2b)
    InvGammaMoment, ///< (K + 1) / (2b), the mean of the InvGamma((K+1)/2, b) conditional
};

/**
 * K networks over the same p variables, each with its own scatter, sample
 * size and fixed tau_k^2. K = 1 is accepted so the joint fit can be compared
 * with the single-network one.
 */
class JointProblem {
public:
    JointProblem(std::vector<ScatterStats> stats, std::vector<double> tau_sqs);
    JointProblem(const std::vector<Dataset>& datasets, std::vector<double> tau_sqs);

    std::size_t k() const { return stats_.size(); }
    Index p() const { return stats_.front().p(); }
    const ScatterStats& stats(std::size_t k) const { return stats_[k]; }
    double tau_sq(std::size_t k) const { return tau_sqs_[k]; }

private:
    std::vector<ScatterStats> stats_;
    std::vector<double> tau_sqs_;
};

struct JointOptions {
    MomentMode moment_mode = MomentMode::PaperPrinted;
    int threads = 1;
    std::vector<WarmStart> warm_starts; ///< empty, or one per network
    /// on_iteration gets the joint ECM objective; on_column is called with the network's Theta.
    FitObserver observer;
};

struct JointFit {
    std::vector<EcmFit> fits;  ///< per-network results; each objective_trace holds that network's terms
    Matrix shared_inv_nu;      ///< E[1/nu_ij] from the final E-step
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace; ///< joint_log_posterior after each iteration
};

/// b = 1 + sum_k 1/lambda_ijk^2;  E[log nu] = log b - psi((K+1)/2);  E[1/nu] per `mode`.
LatentSummary e_step_joint(const std::vector<Matrix>& lambda_sqs, MomentMode mode);
LatentSummary e_step_joint(const std::vector<ScaleMatrix>& lambda_sqs, MomentMode mode);

/// (shared_inv_nu + theta^2 / (2 tau_k^2)) / 2.
double cm_lambda_joint(double theta_ijk, double shared_inv_nu, double tau_sq_k);

/**
 * Joint ECM objective up to a constant:
 *   sum_k { (n_k/2) log det(theta_k) - tr(S_k theta_k)/2
 *           + sum_{i<j} [ -2 log lambda_ijk^2 - theta_ijk^2 / (2 tau_k^2 lambda_ijk^2) ] }
 *   + sum_{i<j} [ -((K+3)/2) E[log nu_ij] - (1 + sum_k 1/lambda_ijk^2) E[1/nu_ij] ]
 */
double joint_objective_value(const std::vector<Matrix>& thetas, const std::vector<Matrix>& lambda_sqs,
                             const LatentSummary& latent, const JointProblem& problem);

/// Joint log posterior with the shared nu integrated out: the per-network terms above
/// plus sum_{i<j} -((K+1)/2) log(1 + sum_k 1/lambda_ijk^2).
double joint_log_posterior(const std::vector<Matrix>& thetas, const std::vector<Matrix>& lambda_sqs,
                           const JointProblem& problem);

/**
 * Shared E-step, then a lambda sweep and a Theta sweep per network, until every
 * network's max |Theta change| is below config.tol in the same iteration.
 * tau_k^2 come from the problem; config.tau_mode must be Fixed.
 */
JointFit fit_joint(const JointProblem& problem, const EcmConfig& config, const JointOptions& options = {});

} // namespace ghs
