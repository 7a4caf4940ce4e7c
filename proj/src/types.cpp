#include "ghsnet/types.hpp"

#include <cmath>
#include <string>

namespace ghs {

namespace {

bool is_symmetric(const Matrix& m) {
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = j + 1; i < m.rows(); ++i) {
            const double a = m(i, j);
            if (std::abs(a - m(j, i)) > 1e-12 * std::max(1.0, std::abs(a))) return false;
        }
    }
    return true;
}

} // namespace

Dataset::Dataset(Matrix observations, DatasetOptions options)
    : x_(std::move(observations)), names_(std::move(options.names)) {
    const Index n = x_.rows();
    const Index p = x_.cols();
    if (n < 2 || p < 2) {
        throw ContractError("dataset needs n >= 2 and p >= 2, got n=" + std::to_string(n) +
                            ", p=" + std::to_string(p));
    }
    if (!x_.allFinite()) throw ContractError("dataset contains non-finite values");
    if (names_.empty()) {
        names_.reserve(static_cast<std::size_t>(p));
        for (Index j = 0; j < p; ++j) names_.push_back("V" + std::to_string(j + 1));
    } else if (static_cast<Index>(names_.size()) != p) {
        throw ContractError("dataset has " + std::to_string(p) + " columns but " +
                            std::to_string(names_.size()) + " names");
    }

    means_ = x_.colwise().mean().transpose();
    x_.rowwise() -= means_.transpose();
    for (Index j = 0; j < p; ++j) {
        const double ss = x_.col(j).squaredNorm();
        if (!(ss > 0.0)) {
            throw DomainError("column '" + names_[static_cast<std::size_t>(j)] +
                              "' has zero variance");
        }
        if (options.scale_unit_variance) x_.col(j) /= std::sqrt(ss / static_cast<double>(n - 1));
    }

    stats_.n = static_cast<int>(n);
    stats_.scatter = x_.transpose() * x_;
    stats_.scatter = 0.5 * (stats_.scatter + stats_.scatter.transpose()).eval();
}

PrecisionMatrix::PrecisionMatrix(Matrix theta) : theta_(std::move(theta)) {
    if (theta_.rows() != theta_.cols() || theta_.rows() < 1) {
        throw ContractError("precision matrix must be square and non-empty");
    }
    if (!theta_.allFinite()) throw DomainError("precision matrix has non-finite entries");
    if (!is_symmetric(theta_)) throw DomainError("precision matrix is not symmetric");
    Eigen::LLT<Matrix> llt(theta_);
    if (llt.info() != Eigen::Success) throw DomainError("precision matrix is not positive definite");
}

ScaleMatrix::ScaleMatrix(Matrix lambda_sq) : lambda_sq_(std::move(lambda_sq)) {
    if (lambda_sq_.rows() != lambda_sq_.cols()) throw ContractError("scale matrix must be square");
    lambda_sq_.diagonal().setOnes();
    if (!(lambda_sq_.array() > 0.0).all() || !lambda_sq_.allFinite()) {
        throw DomainError("local scales must be finite and strictly positive");
    }
    if (!is_symmetric(lambda_sq_)) throw DomainError("scale matrix is not symmetric");
}

ScaleMatrix ScaleMatrix::ones(Index p) { return ScaleMatrix(Matrix::Ones(p, p)); }

GlobalScale::GlobalScale(double tau_sq) : tau_sq_(tau_sq) {
    if (!(tau_sq > 0.0) || !std::isfinite(tau_sq)) {
        throw DomainError("global scale tau^2 must be finite and > 0");
    }
}

std::size_t count_edges(const BoolMatrix& adjacency) {
    std::size_t count = 0;
    for (Index j = 0; j < adjacency.cols(); ++j)
        for (Index i = 0; i < j; ++i)
            if (adjacency(i, j)) ++count;
    return count;
}

std::vector<Edge> edge_list(const BoolMatrix& adjacency) {
    std::vector<Edge> out;
    for (Index i = 0; i < adjacency.rows(); ++i)
        for (Index j = i + 1; j < adjacency.cols(); ++j)
            if (adjacency(i, j)) out.push_back({i, j});
    return out;
}

double sparsity_of(const BoolMatrix& adjacency) {
    const double p = static_cast<double>(adjacency.rows());
    if (p < 2) return 0.0;
    return 2.0 * static_cast<double>(count_edges(adjacency)) / (p * p - p);
}

void check_adjacency(const BoolMatrix& adjacency) {
    if (adjacency.rows() != adjacency.cols()) throw ContractError("adjacency must be square");
    for (Index i = 0; i < adjacency.rows(); ++i) {
        if (adjacency(i, i)) throw ContractError("adjacency must have a false diagonal");
        for (Index j = i + 1; j < adjacency.cols(); ++j)
            if (adjacency(i, j) != adjacency(j, i)) throw ContractError("adjacency must be symmetric");
    }
}

std::size_t GraphEstimate::edge_count() const { return count_edges(adjacency); }
std::vector<Edge> GraphEstimate::edges() const { return edge_list(adjacency); }

} // namespace ghs
