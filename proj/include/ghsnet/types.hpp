#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ghs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

/// Raised when a numerical precondition fails (non-PD input, nonpositive scale, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when caller-supplied arguments violate an API contract.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Edge threshold on |partial correlation| used when none is given.
inline constexpr double kDefaultEdgeThreshold = 1e-5;

struct Edge {
    Index i;
    Index j;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Sufficient statistics for the Gaussian likelihood: S = X^T X and n.
struct ScatterStats {
    Matrix scatter;
    int n = 0;

    Index p() const { return scatter.rows(); }
};

struct DatasetOptions {
    bool scale_unit_variance = false;
    std::vector<std::string> names;
};

/**
 * Observation matrix with cached scatter.
 *
 * Columns are centered on construction; the subtracted means are kept in
 * column_means(). With `scale_unit_variance` the centered columns are also
 * divided by their standard deviation. Constant columns are rejected by name.
 */
class Dataset {
public:
    explicit Dataset(Matrix observations, DatasetOptions options = {});

    const Matrix& observations() const { return x_; }
    const Matrix& scatter() const { return stats_.scatter; }
    const ScatterStats& stats() const { return stats_; }
    const Vector& column_means() const { return means_; }
    const std::vector<std::string>& names() const { return names_; }
    int n() const { return stats_.n; }
    Index p() const { return x_.cols(); }

private:
    Matrix x_;
    ScatterStats stats_;
    Vector means_;
    std::vector<std::string> names_;
};

/// Symmetric positive-definite precision matrix. Validated on construction.
class PrecisionMatrix {
public:
    explicit PrecisionMatrix(Matrix theta);

    const Matrix& matrix() const { return theta_; }
    Index p() const { return theta_.rows(); }
    double operator()(Index i, Index j) const { return theta_(i, j); }

private:
    Matrix theta_;
};

/// Squared local scales lambda_ij^2. Diagonal is a placeholder fixed to 1.
class ScaleMatrix {
public:
    explicit ScaleMatrix(Matrix lambda_sq);
    static ScaleMatrix ones(Index p);

    const Matrix& matrix() const { return lambda_sq_; }
    Index p() const { return lambda_sq_.rows(); }
    double operator()(Index i, Index j) const { return lambda_sq_(i, j); }

private:
    Matrix lambda_sq_;
};

/// Conditional expectations E[1/nu_ij] and E[log nu_ij] produced by an E-step.
struct LatentSummary {
    Matrix inv_nu_expect;
    Matrix log_nu_expect;
};

/// Global shrinkage tau^2 > 0.
class GlobalScale {
public:
    explicit GlobalScale(double tau_sq);
    double value() const { return tau_sq_; }

private:
    double tau_sq_;
};

struct GraphEstimate {
    BoolMatrix adjacency;
    Matrix partial_correlations;
    double sparsity = 0.0;

    Index p() const { return adjacency.rows(); }
    std::size_t edge_count() const;
    std::vector<Edge> edges() const;
};

// Shared helpers for symmetric boolean adjacency matrices.
std::size_t count_edges(const BoolMatrix& adjacency);
std::vector<Edge> edge_list(const BoolMatrix& adjacency);
double sparsity_of(const BoolMatrix& adjacency);
void check_adjacency(const BoolMatrix& adjacency);

} // namespace ghs
