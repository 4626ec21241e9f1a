#pragma once

#include "kvstar/rational.hpp"

#include <vector>

namespace kvstar {

using RationalMatrix = std::vector<std::vector<Rational>>;

struct LinearSolution
{
    bool consistent = false;
    std::size_t rank = 0;
    /// Free variables set to zero.
    std::vector<Rational> particular;
    /// One vector per free column, in column order.
    std::vector<std::vector<Rational>> kernel;
    std::vector<std::size_t> pivot_columns;
};

/// Exact Gauss-Jordan elimination of A v = b (A is rows x cols).
LinearSolution solve_linear(RationalMatrix a, std::vector<Rational> b, std::size_t cols);

} // namespace kvstar
