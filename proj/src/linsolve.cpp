#include "kvstar/linsolve.hpp"

#include <cassert>

namespace kvstar {

LinearSolution solve_linear(RationalMatrix a, std::vector<Rational> b, std::size_t cols)
{
    std::size_t rows = a.size();
    assert(b.size() == rows);
    LinearSolution out;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c)
    {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0)
            ++p;
        if (p == rows)
            continue;
        std::swap(a[p], a[r]);
        std::swap(b[p], b[r]);
        Rational inv = 1 / a[r][c];
        for (std::size_t k = c; k < cols; ++k)
            a[r][k] *= inv;
        b[r] *= inv;
        for (std::size_t i = 0; i < rows; ++i)
        {
            if (i == r || a[i][c] == 0)
                continue;
            Rational f = a[i][c];
            for (std::size_t k = c; k < cols; ++k)
                if (a[r][k] != 0)
                    a[i][k] -= f * a[r][k];
            b[i] -= f * b[r];
        }
        out.pivot_columns.push_back(c);
        ++r;
    }
    out.rank = r;
    out.consistent = true;
    for (std::size_t i = r; i < rows; ++i)
        if (b[i] != 0)
            out.consistent = false;

    out.particular.assign(cols, Rational(0));
    for (std::size_t i = 0; i < r; ++i)
        out.particular[out.pivot_columns[i]] = b[i];

    std::vector<bool> is_pivot(cols, false);
    for (auto c : out.pivot_columns)
        is_pivot[c] = true;
    for (std::size_t f = 0; f < cols; ++f)
    {
        if (is_pivot[f])
            continue;
        std::vector<Rational> v(cols, Rational(0));
        v[f] = 1;
        for (std::size_t i = 0; i < r; ++i)
            v[out.pivot_columns[i]] = -a[i][f];
        out.kernel.push_back(std::move(v));
    }
    return out;
}

} // namespace kvstar
