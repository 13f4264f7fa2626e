#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "fastmapd/errors.hpp"

namespace fmd {

struct LassoOptions {
    double tol = 1e-10;       ///< stop when the largest coefficient change in a sweep is below this
    int max_sweeps = 100000;
    bool record_objective = false;
};

template <typename Scalar>
struct LassoResult {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coefficients;
    int sweeps = 0;
    bool converged = false;
    std::vector<Scalar> objective; ///< objective after each sweep, when recorded
};

template <typename Scalar>
Scalar soft_threshold(Scalar value, Scalar threshold)
{
    if (value > threshold)
        return value - threshold;
    if (value < -threshold)
        return value + threshold;
    return Scalar(0);
}

/// 0.5 * ||A c - b||^2 + lambda * ||c||_1
template <typename DerivedA, typename DerivedB, typename DerivedC>
typename DerivedA::Scalar lasso_objective(const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& b,
                                          const Eigen::MatrixBase<DerivedC>& c, typename DerivedA::Scalar lambda)
{
    return typename DerivedA::Scalar(0.5) * (A * c - b).squaredNorm() + lambda * c.template lpNorm<1>();
}

/// Minimizes 0.5 * ||A c - b||^2 + lambda * ||c||_1 by cyclic coordinate descent
/// with soft-thresholding, working on the Gram matrix A^T A so each sweep costs
/// O(M^2) regardless of the number of rows. Zero-norm columns get coefficient 0.
/// Throws NumericError on non-finite input.
template <typename DerivedA, typename DerivedB>
LassoResult<typename DerivedA::Scalar> lasso_fit(const Eigen::MatrixBase<DerivedA>& A,
                                                 const Eigen::MatrixBase<DerivedB>& b,
                                                 typename DerivedA::Scalar lambda, const LassoOptions& options = {})
{
    using Scalar = typename DerivedA::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    if (A.rows() != b.rows() || b.cols() != 1)
        throw std::invalid_argument("lasso_fit: A and b have inconsistent dimensions");
    if (!A.allFinite() || !b.allFinite())
        throw NumericError("lasso_fit: design matrix or targets contain non-finite values");
    if (!(lambda >= Scalar(0)))
        throw std::invalid_argument("lasso_fit: lambda must be non-negative");

    const Eigen::Index m = A.cols();
    const Matrix gram = A.transpose() * A;
    const Vector correlation = A.transpose() * b;

    LassoResult<Scalar> result;
    result.coefficients = Vector::Zero(m);
    Vector& c = result.coefficients;

    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
        Scalar max_change(0);
        for (Eigen::Index j = 0; j < m; ++j) {
            const Scalar curvature = gram(j, j);
            if (curvature <= Scalar(0))
                continue;
            // Correlation of column j with the partial residual that excludes column j.
            const Scalar rho = correlation(j) - (gram.col(j).dot(c) - curvature * c(j));
            const Scalar updated = soft_threshold(rho, lambda) / curvature;
            const Scalar delta = updated - c(j);
            if (delta != Scalar(0)) {
                c(j) = updated;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        result.sweeps = sweep + 1;
        if (options.record_objective)
            result.objective.push_back(lasso_objective(A, b, c, lambda));
        if (max_change < options.tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

} // namespace fmd
