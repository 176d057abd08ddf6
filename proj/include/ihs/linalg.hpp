#pragma once

// Small dense linear-algebra helpers shared by the numerical modules.

#include <span>

#include <Eigen/Dense>

namespace ihs {

inline std::span<const double> as_span(const Eigen::VectorXd& v)
{
    return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Singular values in decreasing order.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& a);

/// Count of singular values above tol * max(sigma_max, 1).
int numerical_rank(const Eigen::MatrixXd& a, double tol);

/// Orthonormal basis (columns) of the kernel of `a`, using the same cutoff
/// as numerical_rank.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double tol);

/// Orthonormal basis (columns) of the column space of `a`.
Eigen::MatrixXd range_space(const Eigen::MatrixXd& a, double tol);

/// Minimum-norm least-squares solution of a x = b with singular values
/// below tol * sigma_max treated as zero.
Eigen::VectorXd solve_min_norm(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol = 1e-12);

}  // namespace ihs
