#include "kvstar/kv.hpp"

#include "kvstar/envelope.hpp"
#include "kvstar/linsolve.hpp"

#include <map>
#include <string>

namespace kvstar {

using freelie::Word;

namespace {

FreeLieSeries y(unsigned i, int truncation)
{
    return FreeLieSeries::generator(i, truncation);
}

std::vector<Rational> coordinates(FreeLieSeries const& s, std::vector<Word> const& basis)
{
    std::vector<Rational> out;
    out.reserve(basis.size());
    for (auto const& w : basis)
        out.push_back(s.coefficient(w));
    return out;
}

FreeLieSeries from_coordinates(std::span<Rational const> c, std::vector<Word> const& basis, int truncation)
{
    FreeLieSeries s(truncation);
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (c[i] != 0)
            s.add_term(basis[i], c[i]);
    return s;
}

// Rows G_j + F_j(y2, y1) = 0 over unknowns (F coords, G coords).
RationalMatrix symmetry_rows(std::vector<Word> const& basis, int truncation)
{
    std::size_t const b = basis.size();
    RationalMatrix rows(b, std::vector<Rational>(2 * b));
    for (std::size_t c = 0; c < b; ++c)
    {
        auto swapped = freelie::swap_generators(FreeLieSeries::basis(basis[c], truncation));
        auto coords = coordinates(swapped, basis);
        for (std::size_t r = 0; r < b; ++r)
            rows[r][c] = coords[r];
        rows[c][b + c] += 1;
    }
    return rows;
}

struct DegreeSolve
{
    std::vector<Rational> x;
    bool symmetric = false;
};

// Solves a x = rhs, first with the symmetry rows appended; falls back to the bare system.
DegreeSolve solve_with_symmetry(RationalMatrix const& a, std::vector<Rational> const& rhs,
                                RationalMatrix const& sym, std::size_t cols, char const* what)
{
    RationalMatrix full = a;
    auto full_rhs = rhs;
    for (auto const& row : sym)
    {
        full.push_back(row);
        full_rhs.push_back(0);
    }
    auto with_sym = solve_linear(full, full_rhs, cols);
    if (with_sym.consistent)
        return {with_sym.particular, true};
    auto bare = solve_linear(a, rhs, cols);
    if (!bare.consistent)
        throw InfeasibleDegree(std::string(what) + ": inconsistent linear system");
    return {bare.particular, false};
}

std::vector<Polynomial> evaluate(LieAlgebra const& g, FreeLieSeries const& s, std::size_t nvars,
                                 std::size_t y1_first, std::size_t y2_first, int cap)
{
    std::vector<std::vector<Polynomial>> assignment{coordinate_block(g, nvars, y1_first),
                                                    coordinate_block(g, nvars, y2_first)};
    return evaluate_free_lie(g, s, assignment, DegreeCap{0, nvars, cap});
}

// tr(ad y o d_y U) with y the block starting at y_first.
Polynomial trace_term(LieAlgebra const& g, std::span<Polynomial const> u, std::size_t nvars,
                      std::size_t y_first)
{
    std::size_t const d = g.dim();
    Polynomial out(nvars);
    for (std::size_t k = 0; k < d; ++k)
    {
        if (u[k].is_zero())
            continue;
        for (std::size_t m = 0; m < d; ++m)
        {
            auto du = u[k].derivative(y_first + m);
            if (du.is_zero())
                continue;
            Polynomial ad(nvars);
            for (std::size_t i = 0; i < d; ++i)
            {
                auto f = g.structure(i, k, m);
                if (f != 0)
                    ad += f * Polynomial::variable(nvars, y_first + i);
            }
            out += ad * du;
        }
    }
    return out;
}

Polynomial divergence_poly(LieAlgebra const& g, FreeLieSeries const& u1, FreeLieSeries const& u2,
                           std::size_t nvars, std::size_t y1_first, std::size_t y2_first, int cap)
{
    auto U1 = evaluate(g, u1, nvars, y1_first, y2_first, cap);
    auto U2 = evaluate(g, u2, nvars, y1_first, y2_first, cap);
    auto out = trace_term(g, U1, nvars, y1_first) + trace_term(g, U2, nvars, y2_first);
    return out.truncated(cap);
}

// Moves F_j, G_j along the degree-j kernel so that KV2 holds at degree j on every algebra.
void impose_kv2(KVPair& pair, int j, std::span<LieAlgebra const> algebras)
{
    auto const& kernel = pair.kernel[j];
    std::vector<Polynomial> base;
    std::vector<std::vector<Polynomial>> columns(kernel.size());
    for (auto const& g : algebras)
    {
        std::size_t const nv = 2 * g.dim();
        base.push_back(kv2_residual(g, pair, j).series.homogeneous_part(j));
        for (std::size_t a = 0; a < kernel.size(); ++a)
            columns[a].push_back(divergence_poly(g, kernel[a].f, kernel[a].g, nv, 0, g.dim(), j));
    }
    bool all_zero = true;
    for (auto const& b : base)
        all_zero = all_zero && b.is_zero();
    if (all_zero)
        return;

    // One row per (algebra, monomial) present anywhere.
    std::vector<std::vector<Exponent>> support(algebras.size());
    for (std::size_t i = 0; i < algebras.size(); ++i)
    {
        std::map<Exponent, bool> seen;
        for (auto const& [e, c] : base[i].terms())
            seen[e] = true;
        for (auto const& col : columns)
            for (auto const& [e, c] : col[i].terms())
                seen[e] = true;
        for (auto const& [e, unused] : seen)
            support[i].push_back(e);
    }
    std::vector<Rational> rhs;
    for (std::size_t i = 0; i < algebras.size(); ++i)
        for (auto const& e : support[i])
            rhs.push_back(-base[i].coefficient(e));
    RationalMatrix a(rhs.size(), std::vector<Rational>(kernel.size()));
    for (std::size_t c = 0; c < kernel.size(); ++c)
    {
        std::size_t r = 0;
        for (std::size_t i = 0; i < algebras.size(); ++i)
            for (auto const& e : support[i])
                a[r++][c] = columns[c][i].coefficient(e);
    }

    auto basis = freelie::lyndon_words(2, j);
    RationalMatrix sym;
    if (pair.symmetric[j])
    {
        auto rows = symmetry_rows(basis, pair.order);
        for (auto const& row : rows)
        {
            std::vector<Rational> out(kernel.size());
            for (std::size_t c = 0; c < kernel.size(); ++c)
            {
                auto v = coordinates(kernel[c].f, basis);
                auto w = coordinates(kernel[c].g, basis);
                for (std::size_t q = 0; q < basis.size(); ++q)
                    out[c] += row[q] * v[q] + row[basis.size() + q] * w[q];
            }
            sym.push_back(std::move(out));
        }
    }
    auto solved = solve_with_symmetry(a, rhs, sym, kernel.size(),
                                      ("KV2 at degree " + std::to_string(j)).c_str());
    pair.symmetric[j] = pair.symmetric[j] && solved.symmetric;
    for (std::size_t c = 0; c < kernel.size(); ++c)
    {
        if (solved.x[c] == 0)
            continue;
        pair.F += solved.x[c] * kernel[c].f;
        pair.G += solved.x[c] * kernel[c].g;
    }
}

} // namespace

FreeLieSeries kv1_lhs(int N)
{
    if (N < 1)
        throw Error("kv1_lhs: N must be at least 1");
    auto y1 = y(0, N);
    auto y2 = y(1, N);
    return y1 + y2 - freelie::log_exp_product(y2, y1, N);
}

FreeLieSeries kv1_residual(FreeLieSeries const& F, FreeLieSeries const& G, int N)
{
    auto y1 = y(0, N);
    auto y2 = y(1, N);
    return kv1_lhs(N) - freelie::series_of_ad(freelie::AdSeries::one_minus_exp_neg_ad, y1, F, N) -
           freelie::series_of_ad(freelie::AdSeries::exp_ad_minus_one, y2, G, N);
}

KVPair solve_kv(int N, std::span<LieAlgebra const> algebras, int kv2_degree)
{
    if (N < 2)
        throw Error("solve_kv: N must be at least 2");
    if (!algebras.empty() && (kv2_degree < 1 || kv2_degree > N - 1))
        throw Error("solve_kv: KV2 degree must lie in [1, N - 1]");
    KVPair pair;
    pair.F = FreeLieSeries(N);
    pair.G = FreeLieSeries(N);
    pair.order = N;
    pair.kernel.resize(N);
    pair.symmetric.assign(N, false);
    pair.kv2_degree = algebras.empty() ? 0 : kv2_degree;

    auto y1 = y(0, N);
    auto y2 = y(1, N);
    for (int j = 1; j < N; ++j)
    {
        auto rows = freelie::lyndon_words(2, j + 1);
        auto cols = freelie::lyndon_words(2, j);
        std::size_t const b = cols.size();
        auto target = kv1_residual(pair.F, pair.G, j + 1).homogeneous_part(j + 1);

        RationalMatrix a(rows.size(), std::vector<Rational>(2 * b));
        for (std::size_t c = 0; c < b; ++c)
        {
            auto e = FreeLieSeries::basis(cols[c], N);
            auto fc = coordinates(freelie::bracket(y1, e), rows);
            auto gc = coordinates(freelie::bracket(y2, e), rows);
            for (std::size_t r = 0; r < rows.size(); ++r)
            {
                a[r][c] = fc[r];
                a[r][b + c] = gc[r];
            }
        }
        auto rhs = coordinates(target, rows);
        auto solved = solve_with_symmetry(a, rhs, symmetry_rows(cols, N), 2 * b,
                                          ("KV1 at degree " + std::to_string(j + 1)).c_str());
        pair.symmetric[j] = solved.symmetric;
        std::span<Rational const> x(solved.x);
        pair.F += from_coordinates(x.subspan(0, b), cols, N);
        pair.G += from_coordinates(x.subspan(b, b), cols, N);

        auto homogeneous = solve_linear(a, std::vector<Rational>(rows.size()), 2 * b);
        for (auto const& v : homogeneous.kernel)
        {
            std::span<Rational const> kv(v);
            pair.kernel[j].push_back(
                {from_coordinates(kv.subspan(0, b), cols, N), from_coordinates(kv.subspan(b, b), cols, N)});
        }

        if (j <= pair.kv2_degree)
            impose_kv2(pair, j, algebras);
    }
    return pair;
}

KVPair solve_kv1(int N)
{
    return solve_kv(N, {}, 0);
}

TraceSeries divergence(LieAlgebra const& g, TangentialDerivation const& u, int N)
{
    std::size_t const d = g.dim();
    return {divergence_poly(g, u.u1, u.u2, 2 * d, 0, d, N), N};
}

TraceSeries kv2_rhs(LieAlgebra const& g, int N)
{
    std::size_t const d = g.dim();
    std::size_t const nv = 2 * d;
    auto T = ad_analytic_series(g, AnalyticKind::todd, AnalyticMode::trace, N).series;
    DegreeCap const cap{0, nv, N};

    auto shifted = [&](std::size_t first) {
        std::vector<std::size_t> map(d);
        for (std::size_t k = 0; k < d; ++k)
            map[k] = first + k;
        return T.remap(nv, map);
    };
    auto z = freelie::log_exp_product(y(0, N), y(1, N), N);
    auto Z = evaluate(g, z, nv, 0, d, N);
    auto TZ = T.substitute(Z, cap);

    Polynomial out = shifted(0) + shifted(d) - TZ - Polynomial::constant(nv, Rational(static_cast<long>(d)));
    out *= Rational(1, 2);
    return {out.truncated(N), N};
}

TraceSeries kv2_residual(LieAlgebra const& g, KVPair const& pair, int N)
{
    auto lhs = divergence(g, {pair.F.truncated(N), pair.G.truncated(N)}, N);
    return {lhs.series - kv2_rhs(g, N).series, N};
}

bool DztResidual::is_zero() const
{
    for (auto const& s : by_t_power)
        if (!s.is_zero())
            return false;
    return true;
}

DztResidual dzt_residual(KVPair const& pair, int N)
{
    if (N > pair.order)
        throw Error("dzt_residual: pair is only solved to degree " + std::to_string(pair.order));
    auto y1 = y(0, N);
    auto y2 = y(1, N);
    auto Z = freelie::log_exp_product(y1, y2, N);
    DztResidual out;
    for (int n = 2; n <= N; ++n)
    {
        auto r = Rational(n - 1) * Z.homogeneous_part(n);
        for (int j = 1; j < n; ++j)
        {
            std::vector<FreeLieSeries> rep{freelie::bracket(y1, pair.F.homogeneous_part(j).truncated(N)),
                                           freelie::bracket(y2, pair.G.homogeneous_part(j).truncated(N))};
            r -= freelie::directional_substitute(Z.homogeneous_part(n - j), rep, N);
        }
        out.by_t_power.push_back(r.homogeneous_part(n));
    }
    return out;
}

namespace {

// Star products of monomials, split by hbar-order.
class StarCache
{
  public:
    explicit StarCache(LieAlgebra const& g) : env_(g), d_(g.dim()) {}

    // Component of order n of a * b for polynomials a, b.
    Polynomial order_part(Polynomial const& a, Polynomial const& b, int n)
    {
        Polynomial out(d_);
        for (auto const& [ea, ca] : a.terms())
            for (auto const& [eb, cb] : b.terms())
            {
                int deg = exponent_degree(ea) + exponent_degree(eb) - n;
                if (deg < 0)
                    continue;
                out += (ca * cb) * product(ea, eb).homogeneous_part(deg);
            }
        return out;
    }

  private:
    Polynomial const& product(Exponent const& a, Exponent const& b)
    {
        auto key = std::make_pair(a, b);
        auto it = memo_.find(key);
        if (it == memo_.end())
            it = memo_.emplace(key, env_.star(Polynomial::monomial(a, 1), Polynomial::monomial(b, 1))).first;
        return it->second;
    }

    Envelope env_;
    std::size_t d_;
    std::map<std::pair<Exponent, Exponent>, Polynomial> memo_;
};

Exponent slice(Exponent const& e, std::size_t first, std::size_t count)
{
    return Exponent(e.begin() + first, e.begin() + first + count);
}

// S_i = <x, [y_i, U]> + tr(ad y_i d_{y_i} U) in (x, y1, y2) variables.
Polynomial homotopy_generator(LieAlgebra const& g, FreeLieSeries const& u, std::size_t which, int cap)
{
    std::size_t const d = g.dim();
    std::size_t const nv = 3 * d;
    auto U = evaluate(g, u, nv, d, 2 * d, cap);
    auto Y = coordinate_block(g, nv, (1 + which) * d);
    auto br = lie_bracket(g, Y, U);
    Polynomial out(nv);
    for (std::size_t k = 0; k < d; ++k)
        out += Polynomial::variable(nv, k) * br[k];
    out += trace_term(g, U, nv, (1 + which) * d);
    return out;
}

} // namespace

HomotopyReport homotopy_check(LieAlgebra const& g, KVPair const& pair, Polynomial const& f1,
                              Polynomial const& f2, int N)
{
    if (N < 1)
        throw Error("homotopy_check: N must be at least 1");
    if (pair.order <= N)
        throw Error("homotopy_check: needs F and G through degree " + std::to_string(N));
    std::size_t const d = g.dim();
    if (f1.nvars() != d || f2.nvars() != d)
        throw Error("homotopy_check: polynomials must live in " + std::to_string(d) + " variables");

    StarCache cache(g);
    HomotopyReport report{Polynomial(d), Polynomial(d), Polynomial(d)};
    for (int n = 1; n <= N; ++n)
        report.lhs += cache.order_part(f1, f2, n);

    for (int j = 1; j <= N; ++j)
    {
        for (std::size_t which = 0; which < 2; ++which)
        {
            auto const& u = which == 0 ? pair.F : pair.G;
            auto uj = u.homogeneous_part(j);
            if (uj.is_zero())
                continue;
            auto S = homotopy_generator(g, uj.truncated(j + 1), which, j + 1);
            for (auto const& [e, c] : S.terms())
            {
                auto xe = Polynomial::monomial(slice(e, 0, d), 1);
                auto gamma = slice(e, d, d);
                auto delta = slice(e, 2 * d, d);
                auto a = f1.derivative(gamma);
                auto b = f2.derivative(delta);
                if (a.is_zero() || b.is_zero())
                    continue;
                if (which == 0)
                    a = xe * a;
                else
                    b = xe * b;
                // t^{j-1} from the rescaled series, t^n from the star order.
                for (int n = 0; j + n <= N; ++n)
                    report.rhs += (c / Rational(j + n)) * cache.order_part(a, b, n);
            }
        }
    }
    report.difference = report.lhs - report.rhs;
    return report;
}

std::vector<LieAlgebra> kv2_search_family()
{
    std::vector<LieAlgebra> out;
    for (auto name : {"aff1", "sl2", "gl2", "heis3"})
        out.push_back(builtin_algebra(name));
    return out;
}

} // namespace kvstar
