#include "kvstar/liealg.hpp"

#include <json.hpp>

#include <cassert>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace kvstar {

JacobiViolation::JacobiViolation(std::array<std::size_t, 4> where, Rational v)
    : Error("Jacobi identity fails at (i,j,k,l) = (" + std::to_string(where[0]) + "," +
            std::to_string(where[1]) + "," + std::to_string(where[2]) + "," +
            std::to_string(where[3]) + "), cycle value " + to_string(v)),
      indices(where), value(std::move(v))
{
}

LieAlgebra LieAlgebra::make(std::size_t dim, std::span<Bracket const> brackets, std::string name,
                            std::vector<std::string> basis)
{
    if (dim == 0)
        throw Error("Lie algebra dimension must be positive");
    if (!basis.empty() && basis.size() != dim)
        throw Error("basis name count does not match dimension");

    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Rational> given;
    for (auto const& b : brackets)
    {
        if (b.i >= dim || b.j >= dim || b.k >= dim)
            throw Error("structure constant index out of range");
        if (b.i == b.j)
        {
            if (b.coefficient != 0)
                throw AntisymmetryViolation("[x" + std::to_string(b.i) + ",x" + std::to_string(b.i) +
                                            "] must vanish");
            continue;
        }
        auto key = std::make_tuple(b.i, b.j, b.k);
        if (!given.emplace(key, b.coefficient).second)
            throw AntisymmetryViolation("structure constant (" + std::to_string(b.i) + "," +
                                        std::to_string(b.j) + "," + std::to_string(b.k) +
                                        ") listed twice");
    }

    LieAlgebra g(dim);
    for (auto const& [key, c] : given)
    {
        auto [i, j, k] = key;
        if (auto it = given.find({j, i, k}); it != given.end() && it->second != -c)
            throw AntisymmetryViolation("f_" + std::to_string(i) + std::to_string(j) + "^" +
                                        std::to_string(k) + " != -f_" + std::to_string(j) +
                                        std::to_string(i) + "^" + std::to_string(k));
        g.table_[g.index(i, j, k)] = c;
        g.table_[g.index(j, i, k)] = -c;
    }
    g.name_ = std::move(name);
    if (basis.empty())
        for (std::size_t i = 0; i < dim; ++i)
            basis.push_back("x" + std::to_string(i));
    g.basis_ = std::move(basis);

    // sum_m f_ij^m f_mk^l + f_jk^m f_mi^l + f_ki^m f_mj^l = 0
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j)
            for (std::size_t k = j + 1; k < dim; ++k)
                for (std::size_t l = 0; l < dim; ++l)
                {
                    Rational acc = 0;
                    for (std::size_t m = 0; m < dim; ++m)
                        acc += g.structure(i, j, m) * g.structure(m, k, l) +
                               g.structure(j, k, m) * g.structure(m, i, l) +
                               g.structure(k, i, m) * g.structure(m, j, l);
                    if (acc != 0)
                        throw JacobiViolation({i, j, k, l}, acc);
                }
    return g;
}

Rational LieAlgebra::structure(std::size_t i, std::size_t j, std::size_t k) const
{
    assert(i < dim_ && j < dim_ && k < dim_);
    return table_[index(i, j, k)];
}

bool LieAlgebra::is_abelian() const
{
    for (auto const& c : table_)
        if (c != 0)
            return false;
    return true;
}

LieAlgebra LieAlgebra::scaled(Rational const& t) const
{
    LieAlgebra g = *this;
    for (auto& c : g.table_)
        c *= t;
    return g;
}

// ---------------------------------------------------------------------------

namespace {

using B = LieAlgebra::Bracket;

LieAlgebra make_gl2()
{
    // x0 = E11, x1 = E12, x2 = E21, x3 = E22; [E_ab, E_cd] = d_bc E_ad - d_da E_cb
    std::vector<B> entries;
    auto unit = [](std::size_t a, std::size_t b) { return 2 * a + b; };
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t c = 0; c < 2; ++c)
                for (std::size_t d = 0; d < 2; ++d)
                {
                    std::size_t i = unit(a, b), j = unit(c, d);
                    if (i >= j)
                        continue;
                    std::map<std::size_t, Rational> out;
                    if (b == c)
                        out[unit(a, d)] += 1;
                    if (d == a)
                        out[unit(c, b)] -= 1;
                    for (auto const& [k, v] : out)
                        if (v != 0)
                            entries.push_back({i, j, k, v});
                }
    return LieAlgebra::make(4, entries, "gl2", {"E11", "E12", "E21", "E22"});
}

} // namespace

LieAlgebra builtin_algebra(std::string_view name)
{
    if (name == "heis3")
    {
        std::vector<B> e{{0, 1, 2, 1}};
        return LieAlgebra::make(3, e, "heis3");
    }
    if (name == "aff1")
    {
        std::vector<B> e{{0, 1, 1, 1}};
        return LieAlgebra::make(2, e, "aff1", {"a", "b"});
    }
    if (name == "sl2")
    {
        // (e, f, h): [e,f] = h, [h,e] = 2e, [h,f] = -2f
        std::vector<B> e{{0, 1, 2, 1}, {2, 0, 0, 2}, {2, 1, 1, -2}};
        return LieAlgebra::make(3, e, "sl2", {"e", "f", "h"});
    }
    if (name == "gl2")
        return make_gl2();
    if (name.starts_with("abelian"))
    {
        auto digits = name.substr(7);
        std::size_t d = 3;
        if (!digits.empty())
        {
            d = 0;
            for (char c : digits)
            {
                if (c < '0' || c > '9')
                    throw UnknownAlgebra("unknown built-in algebra '" + std::string(name) + "'");
                d = d * 10 + static_cast<std::size_t>(c - '0');
            }
        }
        if (d == 0 || d > 16)
            throw UnknownAlgebra("abelian dimension must be in 1..16");
        return LieAlgebra::make(d, std::span<B const>{}, "abelian" + std::to_string(d));
    }
    throw UnknownAlgebra("unknown built-in algebra '" + std::string(name) + "'");
}

std::vector<std::string> builtin_algebra_names()
{
    return {"abelian3", "heis3", "aff1", "sl2", "gl2"};
}

LieAlgebra parse_lie_algebra_json(std::string_view text)
{
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(text);
    }
    catch (nlohmann::json::parse_error const& e)
    {
        throw ParseError(std::string("Lie algebra JSON: ") + e.what());
    }
    try
    {
        auto dim = doc.at("dim").get<std::size_t>();
        std::vector<std::string> basis;
        if (doc.contains("basis"))
            basis = doc.at("basis").get<std::vector<std::string>>();
        std::string name = doc.value("name", std::string{});
        std::vector<B> entries;
        std::set<std::pair<std::size_t, std::size_t>> pairs;
        for (auto const& item : doc.at("brackets"))
        {
            auto i = item.at("i").get<std::size_t>();
            auto j = item.at("j").get<std::size_t>();
            if (i >= dim || j >= dim)
                throw Error("bracket index out of range");
            if (!pairs.emplace(std::min(i, j), std::max(i, j)).second)
                throw AntisymmetryViolation("bracket pair (" + std::to_string(i) + "," +
                                            std::to_string(j) + ") listed twice");
            for (auto const& [key, value] : item.at("coeffs").items())
            {
                std::size_t k = std::stoul(key);
                Rational c = value.is_string() ? parse_rational(value.get<std::string>())
                                               : Rational(value.get<long>());
                entries.push_back({i, j, k, c});
            }
        }
        return LieAlgebra::make(dim, entries, std::move(name), std::move(basis));
    }
    catch (nlohmann::json::exception const& e)
    {
        throw ParseError(std::string("Lie algebra JSON: ") + e.what());
    }
}

LieAlgebra load_lie_algebra_json(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_lie_algebra_json(buffer.str());
}

std::string to_json(LieAlgebra const& g)
{
    nlohmann::json doc;
    doc["dim"] = g.dim();
    doc["basis"] = g.basis();
    auto brackets = nlohmann::json::array();
    for (std::size_t i = 0; i < g.dim(); ++i)
        for (std::size_t j = i + 1; j < g.dim(); ++j)
        {
            nlohmann::json coeffs = nlohmann::json::object();
            for (std::size_t k = 0; k < g.dim(); ++k)
                if (auto c = g.structure(i, j, k); c != 0)
                    coeffs[std::to_string(k)] = to_string(c);
            if (!coeffs.empty())
                brackets.push_back({{"i", i}, {"j", j}, {"coeffs", coeffs}});
        }
    doc["brackets"] = brackets;
    return doc.dump();
}

LieAlgebra resolve_lie_algebra(std::string_view source)
{
    if (source.starts_with("builtin:"))
        return builtin_algebra(source.substr(8));
    return load_lie_algebra_json(std::string(source));
}

// ---------------------------------------------------------------------------

RationalMatrix ad_matrix(LieAlgebra const& g, std::span<Rational const> x)
{
    std::size_t d = g.dim();
    if (x.size() != d)
        throw Error("ad_matrix: vector length must equal dim");
    RationalMatrix m(d, std::vector<Rational>(d));
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < d; ++i)
                m[k][j] += x[i] * g.structure(i, j, k);
    return m;
}

PolyMatrix ad_matrix_symbolic(LieAlgebra const& g, std::size_t nvars, std::size_t first_var)
{
    std::size_t d = g.dim();
    PolyMatrix m(d, std::vector<Polynomial>(d, Polynomial(nvars)));
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < d; ++i)
                if (auto c = g.structure(i, j, k); c != 0)
                    m[k][j] += c * Polynomial::variable(nvars, first_var + i);
    return m;
}

Polynomial poisson_bracket(LieAlgebra const& g, Polynomial const& f1, Polynomial const& f2)
{
    std::size_t d = g.dim();
    if (f1.nvars() != d || f2.nvars() != d)
        throw Error("poisson_bracket: polynomials must live in dim(g) variables");
    Polynomial r(d);
    std::vector<Polynomial> d1, d2;
    for (std::size_t i = 0; i < d; ++i)
    {
        d1.push_back(f1.derivative(i));
        d2.push_back(f2.derivative(i));
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
        {
            if (i == j || d1[i].is_zero() || d2[j].is_zero())
                continue;
            Polynomial coeff(d);
            for (std::size_t k = 0; k < d; ++k)
                if (auto c = g.structure(i, j, k); c != 0)
                    coeff += c * Polynomial::variable(d, k);
            if (!coeff.is_zero())
                r += coeff * d1[i] * d2[j];
        }
    return r;
}

std::vector<Polynomial> lie_bracket(LieAlgebra const& g, std::span<Polynomial const> a,
                                    std::span<Polynomial const> b, std::optional<DegreeCap> cap)
{
    std::size_t d = g.dim();
    assert(a.size() == d && b.size() == d);
    std::size_t nvars = a.empty() ? 0 : a[0].nvars();
    std::vector<Polynomial> r(d, Polynomial(nvars));
    for (std::size_t i = 0; i < d; ++i)
    {
        if (a[i].is_zero())
            continue;
        for (std::size_t j = 0; j < d; ++j)
        {
            if (i == j || b[j].is_zero())
                continue;
            Polynomial product;
            bool computed = false;
            for (std::size_t k = 0; k < d; ++k)
            {
                auto c = g.structure(i, j, k);
                if (c == 0)
                    continue;
                if (!computed)
                {
                    product = multiply(a[i], b[j], cap);
                    computed = true;
                }
                r[k] += c * product;
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------

AnalyticKind parse_analytic_kind(std::string_view name)
{
    if (name == "sqrt_j")
        return AnalyticKind::sqrt_j;
    if (name == "todd")
        return AnalyticKind::todd;
    if (name == "gamma")
        return AnalyticKind::gamma;
    throw Error("unknown analytic series kind '" + std::string(name) + "'");
}

AnalyticMode parse_analytic_mode(std::string_view name)
{
    if (name == "trace")
        return AnalyticMode::trace;
    if (name == "det_sqrt")
        return AnalyticMode::det_sqrt;
    throw Error("unknown analytic series mode '" + std::string(name) + "'");
}

std::vector<Rational> analytic_coefficients(AnalyticKind kind, int degree)
{
    std::vector<Rational> c(static_cast<std::size_t>(degree) + 1);
    for (int k = 0; k <= degree; ++k)
    {
        if (kind == AnalyticKind::todd)
            c[k] = bernoulli(k) / factorial(k);
        else
            c[k] = Rational(k % 2 == 0 ? 1 : -1) / factorial(k + 1);
    }
    return c;
}

namespace {

// log of a univariate series with constant term 1
std::vector<Rational> univariate_log(std::vector<Rational> const& f)
{
    assert(!f.empty() && f[0] == 1);
    std::size_t n = f.size();
    std::vector<Rational> u = f;
    u[0] = 0;
    std::vector<Rational> result(n), power(n);
    power[0] = 1;
    for (std::size_t m = 1; m < n; ++m)
    {
        std::vector<Rational> next(n);
        for (std::size_t a = 0; a < n; ++a)
            if (power[a] != 0)
                for (std::size_t b = 1; a + b < n; ++b)
                    next[a + b] += power[a] * u[b];
        power = std::move(next);
        Rational sign = m % 2 == 1 ? Rational(1) : Rational(-1);
        for (std::size_t a = 0; a < n; ++a)
            result[a] += sign * power[a] / Rational(m);
    }
    return result;
}

Polynomial trace_of(PolyMatrix const& m)
{
    Polynomial t(m[0][0].nvars());
    for (std::size_t i = 0; i < m.size(); ++i)
        t += m[i][i];
    return t;
}

PolyMatrix matmul(PolyMatrix const& a, PolyMatrix const& b, int max_degree)
{
    std::size_t d = a.size();
    std::size_t nvars = a[0][0].nvars();
    DegreeCap cap{0, nvars, max_degree};
    PolyMatrix r(d, std::vector<Polynomial>(d, Polynomial(nvars)));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k)
        {
            if (a[i][k].is_zero())
                continue;
            for (std::size_t j = 0; j < d; ++j)
                if (!b[k][j].is_zero())
                    r[i][j] += multiply(a[i][k], b[k][j], cap);
        }
    return r;
}

} // namespace

namespace {

// traces[k] = tr(ad(x)^k), k = 0..degree
std::vector<Polynomial> ad_power_traces(LieAlgebra const& g, int degree)
{
    std::size_t d = g.dim();
    std::vector<Polynomial> traces(static_cast<std::size_t>(degree) + 1, Polynomial(d));
    traces[0] = Polynomial::constant(d, Rational(static_cast<long>(d)));
    if (degree >= 1 && !g.is_abelian())
    {
        auto ad = ad_matrix_symbolic(g, d, 0);
        PolyMatrix power = ad;
        for (int k = 1; k <= degree; ++k)
        {
            if (k > 1)
                power = matmul(power, ad, degree);
            traces[k] = trace_of(power);
        }
    }
    return traces;
}

} // namespace

Polynomial half_log_det_series(LieAlgebra const& g, AnalyticKind kind, int degree)
{
    if (degree < 0)
        throw Error("half_log_det_series: degree must be non-negative");
    if (kind == AnalyticKind::sqrt_j)
        kind = AnalyticKind::gamma;
    auto coeffs = univariate_log(analytic_coefficients(kind, degree));
    auto traces = ad_power_traces(g, degree);
    Polynomial acc(g.dim());
    for (int k = 1; k <= degree; ++k)
        if (coeffs[k] != 0)
            acc += coeffs[k] * traces[k];
    return Rational(1, 2) * acc;
}

AdSeriesScalar ad_analytic_series(LieAlgebra const& g, AnalyticKind kind, AnalyticMode mode, int degree)
{
    if (degree < 0)
        throw Error("ad_analytic_series: degree must be non-negative");
    std::size_t d = g.dim();
    if (kind == AnalyticKind::sqrt_j)
        mode = AnalyticMode::det_sqrt;

    AdSeriesScalar out;
    out.truncation = degree;
    if (mode == AnalyticMode::det_sqrt)
    {
        out.series = exp_series(half_log_det_series(g, kind, degree), DegreeCap{0, d, degree});
        return out;
    }
    auto coeffs = analytic_coefficients(kind, degree);
    auto traces = ad_power_traces(g, degree);
    Polynomial acc(d);
    for (int k = 0; k <= degree; ++k)
        if (coeffs[k] != 0)
            acc += coeffs[k] * traces[k];
    out.series = acc;
    return out;
}

std::vector<Polynomial> coordinate_block(LieAlgebra const& g, std::size_t nvars, std::size_t first_var)
{
    std::vector<Polynomial> v;
    for (std::size_t k = 0; k < g.dim(); ++k)
        v.push_back(Polynomial::variable(nvars, first_var + k));
    return v;
}

std::vector<Polynomial> evaluate_free_lie(LieAlgebra const& g, freelie::FreeLieSeries const& s,
                                          std::span<std::vector<Polynomial> const> assignment,
                                          std::optional<DegreeCap> cap)
{
    using freelie::Word;
    if (assignment.empty())
        throw Error("evaluate_free_lie: empty assignment");
    std::size_t d = g.dim();
    std::size_t nvars = assignment[0].empty() ? 0 : assignment[0][0].nvars();
    std::map<Word, std::vector<Polynomial>, freelie::GradedLex> memo;
    std::function<std::vector<Polynomial> const&(Word const&)> image =
        [&](Word const& w) -> std::vector<Polynomial> const& {
        if (auto it = memo.find(w); it != memo.end())
            return it->second;
        std::vector<Polynomial> value;
        if (w.size() == 1)
        {
            if (w[0] >= assignment.size())
                throw Error("evaluate_free_lie: no assignment for generator");
            value = assignment[w[0]];
            if (value.size() != d)
                throw Error("evaluate_free_lie: assignment length must equal dim");
        }
        else
        {
            auto [u, v] = freelie::standard_factorization(w);
            auto const& a = image(u);
            auto const& b = image(v);
            value = lie_bracket(g, a, b, cap);
        }
        return memo.emplace(w, std::move(value)).first->second;
    };
    std::vector<Polynomial> result(d, Polynomial(nvars));
    for (auto const& [w, c] : s.terms())
    {
        auto const& v = image(w);
        for (std::size_t k = 0; k < d; ++k)
            if (!v[k].is_zero())
                result[k] += c * v[k];
    }
    if (cap)
        for (auto& p : result)
            p = p.truncated(*cap);
    return result;
}

} // namespace kvstar
