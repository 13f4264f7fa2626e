#include "fastmapd/monomials.hpp"

#include <stdexcept>
#include <vector>

namespace fmd {

std::size_t monomial_count(int arity, int degree)
{
    if (arity < 1 || degree < 0)
        throw std::invalid_argument("monomials need arity >= 1 and degree >= 0");
    // C(i + arity - 1, i) built incrementally: C(n, i) = C(n - 1, i - 1) * n / i.
    std::size_t total = 0;
    double term = 1.0;
    for (int i = 0; i <= degree; ++i) {
        if (i > 0)
            term = term * (i + arity - 1) / i;
        total += static_cast<std::size_t>(term + 0.5);
        if (term > static_cast<double>(kMaxMonomials) || total > kMaxMonomials)
            throw std::overflow_error("polynomial would have more than 1e6 monomials; lower the degree");
    }
    return total;
}

namespace {

void append_degree(int arity, int remaining, int var, std::vector<int>& current, std::vector<std::vector<int>>& out)
{
    if (var == arity - 1) {
        current[var] = remaining;
        out.push_back(current);
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        current[var] = e;
        append_degree(arity, remaining - e, var + 1, current, out);
    }
    current[var] = 0;
}

} // namespace

ExponentTable enumerate_monomials(int arity, int degree)
{
    const std::size_t count = monomial_count(arity, degree);
    std::vector<std::vector<int>> rows;
    rows.reserve(count);
    std::vector<int> current(arity, 0);
    for (int d = 0; d <= degree; ++d)
        append_degree(arity, d, 0, current, rows);

    ExponentTable table(static_cast<Eigen::Index>(rows.size()), arity);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < arity; ++c)
            table(static_cast<Eigen::Index>(r), c) = rows[r][c];
    return table;
}

} // namespace fmd
