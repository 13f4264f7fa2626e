#pragma once

#include <cstddef>

#include <Eigen/Core>

namespace fmd {

using ExponentTable = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kMaxMonomials = 1'000'000;

/// Number of monomials of total degree <= degree in `arity` variables,
/// sum_{i=0}^{degree} C(i + arity - 1, arity - 1). Throws std::overflow_error
/// above kMaxMonomials.
std::size_t monomial_count(int arity, int degree);

/// All exponent vectors (one per row) with entries >= 0 and total <= degree, in
/// graded lexicographic order; row 0 is the constant monomial.
ExponentTable enumerate_monomials(int arity, int degree);

/// Values of every monomial at x.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> evaluate_monomials(const ExponentTable& exponents,
                                                                             const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index arity = exponents.cols();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(exponents.rows());
    for (Eigen::Index r = 0; r < exponents.rows(); ++r) {
        Scalar value(1);
        for (Eigen::Index c = 0; c < arity; ++c)
            for (int e = 0; e < exponents(r, c); ++e)
                value *= x(c);
        out(r) = value;
    }
    return out;
}

} // namespace fmd
