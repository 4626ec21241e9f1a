#include "kvstar/envelope.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace kvstar {

EnvElement EnvElement::one()
{
    return word({});
}

EnvElement EnvElement::word(IndexWord const& sorted_word, Rational const& c)
{
    assert(std::is_sorted(sorted_word.begin(), sorted_word.end()));
    EnvElement e;
    e.add_term(sorted_word, c);
    return e;
}

int EnvElement::degree() const
{
    int d = -1;
    for (auto const& [w, c] : terms_)
        d = std::max(d, static_cast<int>(w.size()));
    return d;
}

Rational EnvElement::coefficient(IndexWord const& w) const
{
    auto it = terms_.find(w);
    return it == terms_.end() ? Rational(0) : it->second;
}

void EnvElement::add_term(IndexWord const& w, Rational const& c)
{
    if (c == 0)
        return;
    auto [it, inserted] = terms_.try_emplace(w, c);
    if (!inserted)
    {
        it->second += c;
        if (it->second == 0)
            terms_.erase(it);
    }
}

EnvElement& EnvElement::operator+=(EnvElement const& other)
{
    for (auto const& [w, c] : other.terms_)
        add_term(w, c);
    return *this;
}

EnvElement& EnvElement::operator-=(EnvElement const& other)
{
    for (auto const& [w, c] : other.terms_)
        add_term(w, -c);
    return *this;
}

EnvElement& EnvElement::operator*=(Rational const& c)
{
    if (c == 0)
        terms_.clear();
    for (auto& [w, v] : terms_)
        v *= c;
    return *this;
}

EnvElement operator+(EnvElement a, EnvElement const& b)
{
    a += b;
    return a;
}

EnvElement operator-(EnvElement a, EnvElement const& b)
{
    a -= b;
    return a;
}

EnvElement operator*(Rational const& c, EnvElement a)
{
    a *= c;
    return a;
}

IndexWord exponent_to_word(Exponent const& e)
{
    IndexWord w;
    for (std::size_t i = 0; i < e.size(); ++i)
        w.insert(w.end(), e[i], static_cast<std::uint8_t>(i));
    return w;
}

Exponent word_to_exponent(IndexWord const& w, std::size_t nvars)
{
    Exponent e(nvars, 0);
    for (auto letter : w)
    {
        assert(letter < nvars);
        ++e[letter];
    }
    return e;
}

std::string to_string(EnvElement const& e)
{
    std::size_t nvars = 0;
    for (auto const& [w, c] : e.terms())
        for (auto letter : w)
            nvars = std::max<std::size_t>(nvars, letter + 1u);
    Polynomial p(nvars);
    for (auto const& [w, c] : e.terms())
        p.add_term(word_to_exponent(w, nvars), c);
    return to_string(p);
}

// ---------------------------------------------------------------------------

Envelope::Envelope(LieAlgebra g, RewriteStrategy strategy) : g_(std::move(g)), strategy_(strategy)
{
    if (g_.dim() > 255)
        throw Error("Envelope: dimension too large");
}

EnvElement Envelope::reduce_left_insertion(std::uint8_t a, IndexWord const& s) const
{
    if (s.empty() || a <= s.front())
    {
        IndexWord w;
        w.reserve(s.size() + 1);
        w.push_back(a);
        w.insert(w.end(), s.begin(), s.end());
        return EnvElement::word(w);
    }
    auto key = std::make_pair(a, s);
    {
        std::lock_guard lock(mutex_);
        if (auto it = insertion_memo_.find(key); it != insertion_memo_.end())
            return it->second;
    }
    // a b s' = b (a s') + [a, b] s'
    std::uint8_t b = s.front();
    IndexWord rest(s.begin() + 1, s.end());
    EnvElement result;
    auto inner = reduce_left_insertion(a, rest);
    for (auto const& [w, c] : inner.terms())
    {
        auto t = reduce_left_insertion(b, w);
        t *= c;
        result += t;
    }
    for (std::size_t k = 0; k < g_.dim(); ++k)
        if (auto f = g_.structure(a, b, k); f != 0)
        {
            auto t = reduce_left_insertion(static_cast<std::uint8_t>(k), rest);
            t *= f;
            result += t;
        }
    std::lock_guard lock(mutex_);
    return insertion_memo_.emplace(key, std::move(result)).first->second;
}

EnvElement Envelope::reduce_descent(IndexWord const& word) const
{
    std::size_t n = word.size();
    std::optional<std::size_t> descent;
    for (std::size_t p = 0; p + 1 < n; ++p)
        if (word[p] > word[p + 1])
        {
            descent = p;
            if (strategy_ == RewriteStrategy::leftmost_descent)
                break;
        }
    if (!descent)
        return EnvElement::word(word);
    {
        std::lock_guard lock(mutex_);
        if (auto it = descent_memo_.find(word); it != descent_memo_.end())
            return it->second;
    }
    std::size_t p = *descent;
    // x_j x_i -> x_i x_j + [x_j, x_i]
    std::uint8_t j = word[p], i = word[p + 1];
    IndexWord swapped = word;
    std::swap(swapped[p], swapped[p + 1]);
    EnvElement result = reduce_descent(swapped);
    for (std::size_t k = 0; k < g_.dim(); ++k)
        if (auto f = g_.structure(j, i, k); f != 0)
        {
            IndexWord shorter(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(p));
            shorter.push_back(static_cast<std::uint8_t>(k));
            shorter.insert(shorter.end(), word.begin() + static_cast<std::ptrdiff_t>(p) + 2, word.end());
            auto t = reduce_descent(shorter);
            t *= f;
            result += t;
        }
    std::lock_guard lock(mutex_);
    return descent_memo_.emplace(word, std::move(result)).first->second;
}

EnvElement Envelope::pbw_reduce(IndexWord const& word) const
{
    for (auto letter : word)
        if (letter >= g_.dim())
            throw Error("pbw_reduce: index out of range");
    if (strategy_ != RewriteStrategy::left_insertion)
        return reduce_descent(word);
    EnvElement current = EnvElement::one();
    for (auto it = word.rbegin(); it != word.rend(); ++it)
    {
        EnvElement next;
        for (auto const& [w, c] : current.terms())
        {
            auto t = reduce_left_insertion(*it, w);
            t *= c;
            next += t;
        }
        current = std::move(next);
    }
    return current;
}

EnvElement Envelope::multiply(EnvElement const& a, EnvElement const& b) const
{
    EnvElement result;
    for (auto const& [u, cu] : a.terms())
        for (auto const& [v, cv] : b.terms())
        {
            IndexWord w = u;
            w.insert(w.end(), v.begin(), v.end());
            auto t = pbw_reduce(w);
            t *= cu * cv;
            result += t;
        }
    return result;
}

EnvElement const& Envelope::symmetrized_monomial(IndexWord const& sorted) const
{
    {
        std::lock_guard lock(mutex_);
        if (auto it = sym_memo_.find(sorted); it != sym_memo_.end())
            return it->second;
    }
    EnvElement result;
    if (sorted.size() <= 1)
        result = EnvElement::word(sorted);
    else
    {
        // Average over orderings, grouped by the first letter.
        Rational n(static_cast<long>(sorted.size()));
        for (std::size_t p = 0; p < sorted.size(); ++p)
        {
            if (p > 0 && sorted[p] == sorted[p - 1])
                continue;
            auto count = std::count(sorted.begin(), sorted.end(), sorted[p]);
            IndexWord rest = sorted;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(p));
            EnvElement first = EnvElement::word({sorted[p]});
            auto t = multiply(first, symmetrized_monomial(rest));
            t *= Rational(count) / n;
            result += t;
        }
    }
    std::lock_guard lock(mutex_);
    return sym_memo_.emplace(sorted, std::move(result)).first->second;
}

EnvElement Envelope::symmetrize(Polynomial const& f) const
{
    if (f.nvars() != g_.dim())
        throw Error("symmetrize: polynomial must live in dim(g) variables");
    EnvElement result;
    for (auto const& [e, c] : f.terms())
    {
        auto t = symmetrized_monomial(exponent_to_word(e));
        t *= c;
        result += t;
    }
    return result;
}

Polynomial Envelope::unsymmetrize(EnvElement const& e) const
{
    Polynomial f(g_.dim());
    EnvElement rest = e;
    while (!rest.is_zero())
    {
        int top = rest.degree();
        std::vector<std::pair<IndexWord, Rational>> leading;
        for (auto const& [w, c] : rest.terms())
            if (static_cast<int>(w.size()) == top)
                leading.emplace_back(w, c);
        for (auto const& [w, c] : leading)
        {
            f.add_term(word_to_exponent(w, g_.dim()), c);
            auto t = symmetrized_monomial(w);
            t *= c;
            rest -= t;
        }
        assert(rest.degree() < top);
    }
    return f;
}

Polynomial const& Envelope::sqrt_j(int degree) const
{
    {
        std::lock_guard lock(mutex_);
        if (auto it = sqrt_j_.lower_bound(degree); it != sqrt_j_.end())
            return it->second;
    }
    auto s = ad_analytic_series(g_, AnalyticKind::sqrt_j, AnalyticMode::det_sqrt, degree).series;
    std::lock_guard lock(mutex_);
    return sqrt_j_.emplace(degree, std::move(s)).first->second;
}

Polynomial Envelope::duflo_operator(Polynomial const& f) const
{
    if (f.nvars() != g_.dim())
        throw Error("duflo_operator: polynomial must live in dim(g) variables");
    int top = f.degree();
    if (top <= 0)
        return f;
    Polynomial result(g_.dim());
    for (auto const& [beta, s] : sqrt_j(top).terms())
        if (exponent_degree(beta) <= top)
            result += s * f.derivative(beta);
    return result;
}

Polynomial Envelope::duflo_operator_inverse(Polynomial const& h) const
{
    // f = h - (sqrt(j)(d) - 1) f; each pass fixes one more degree from the top.
    Polynomial f = h;
    for (int pass = 0; pass < h.degree(); ++pass)
        f = h - (duflo_operator(f) - f);
    return f;
}

EnvElement Envelope::duflo_iso(Polynomial const& f) const
{
    return symmetrize(duflo_operator(f));
}

Polynomial Envelope::duflo_iso_inverse(EnvElement const& e) const
{
    return duflo_operator_inverse(unsymmetrize(e));
}

Polynomial Envelope::star(Polynomial const& f1, Polynomial const& f2) const
{
    return duflo_iso_inverse(multiply(duflo_iso(f1), duflo_iso(f2)));
}

EnvElement pbw_reduce(LieAlgebra const& g, IndexWord const& word, RewriteStrategy strategy)
{
    return Envelope(g, strategy).pbw_reduce(word);
}

EnvElement symmetrize(LieAlgebra const& g, Polynomial const& f)
{
    return Envelope(g).symmetrize(f);
}

Polynomial unsymmetrize(LieAlgebra const& g, EnvElement const& e)
{
    return Envelope(g).unsymmetrize(e);
}

Polynomial duflo_operator(LieAlgebra const& g, Polynomial const& f)
{
    return Envelope(g).duflo_operator(f);
}

EnvElement duflo_iso(LieAlgebra const& g, Polynomial const& f)
{
    return Envelope(g).duflo_iso(f);
}

Polynomial duflo_iso_inverse(LieAlgebra const& g, EnvElement const& e)
{
    return Envelope(g).duflo_iso_inverse(e);
}

Polynomial star(LieAlgebra const& g, Polynomial const& f1, Polynomial const& f2)
{
    return Envelope(g).star(f1, f2);
}

Polynomial star_scaled(LieAlgebra const& g, Rational const& t, Polynomial const& f1, Polynomial const& f2)
{
    return Envelope(g.scaled(t)).star(f1, f2);
}

// ---------------------------------------------------------------------------

namespace {

Rational exponent_factorial(Exponent const& e)
{
    Rational r = 1;
    for (auto k : e)
        r *= factorial(k);
    return r;
}

// Multiplies the terms of y-degree k by t^(k + shift).
Polynomial scale_by_y_degree(Polynomial const& p, DegreeCap const& block, Rational const& t, int shift)
{
    Polynomial r(p.nvars());
    for (auto const& [e, c] : p.terms())
    {
        int k = exponent_degree(e, block.first, block.count) + shift;
        Rational factor = 1;
        if (k >= 0)
            for (int i = 0; i < k; ++i)
                factor *= t;
        else
            for (int i = 0; i < -k; ++i)
                factor /= t;
        r.add_term(e, c * factor);
    }
    return r;
}

struct DensityParts
{
    std::vector<Polynomial> z;     // Z(y1, y2) as a g-valued vector
    std::vector<Polynomial> y1;
    std::vector<Polynomial> y2;
};

DensityParts density_parts(LieAlgebra const& g, int order)
{
    std::size_t d = g.dim();
    std::size_t nv = 3 * d;
    DegreeCap cap{d, 2 * d, order};
    DensityParts parts;
    parts.y1 = coordinate_block(g, nv, d);
    parts.y2 = coordinate_block(g, nv, 2 * d);
    auto z = freelie::log_exp_product(freelie::FreeLieSeries::generator(0, order),
                                      freelie::FreeLieSeries::generator(1, order), order);
    std::vector<std::vector<Polynomial>> assignment{parts.y1, parts.y2};
    parts.z = evaluate_free_lie(g, z, assignment, cap);
    return parts;
}

ExpSeriesPair assemble_density(LieAlgebra const& g, int order, std::vector<Polynomial> const& y1,
                               std::vector<Polynomial> const& y2, std::vector<Polynomial> const& z_arg,
                               std::vector<Polynomial> const& z_exp)
{
    std::size_t d = g.dim();
    std::size_t nv = 3 * d;
    DegreeCap cap{d, 2 * d, order};
    auto half_log = half_log_det_series(g, AnalyticKind::sqrt_j, order);
    Polynomial log_d = half_log.substitute(y1, cap) + half_log.substitute(y2, cap) -
                       half_log.substitute(z_arg, cap);
    Polynomial pairing(nv);
    for (std::size_t k = 0; k < d; ++k)
        pairing += multiply(Polynomial::variable(nv, k), z_exp[k], cap);
    ExpSeriesPair out;
    out.dim = d;
    out.order = order;
    out.series = multiply(exp_series(log_d.truncated(cap), cap), exp_series(pairing, cap), cap);
    return out;
}

} // namespace

ExpSeriesPair exp_star_expand(LieAlgebra const& g, int order)
{
    if (order < 1)
        throw Error("exp_star_expand: order must be positive");
    std::size_t d = g.dim();
    std::size_t nv = 3 * d;
    Envelope env(g);
    auto exps = exponents_up_to(d, order);
    std::vector<std::size_t> embed(d);
    for (std::size_t i = 0; i < d; ++i)
        embed[i] = i;

    ExpSeriesPair out;
    out.dim = d;
    out.order = order;
    out.series = Polynomial(nv);
    for (auto const& a : exps)
        for (auto const& b : exps)
        {
            if (exponent_degree(a) + exponent_degree(b) > order)
                continue;
            auto product = env.star(Polynomial::monomial(a, 1), Polynomial::monomial(b, 1));
            Exponent ye(nv, 0);
            for (std::size_t i = 0; i < d; ++i)
            {
                ye[d + i] = a[i];
                ye[2 * d + i] = b[i];
            }
            auto weight = Polynomial::monomial(ye, 1 / (exponent_factorial(a) * exponent_factorial(b)));
            out.series += weight * product.remap(nv, embed);
        }
    return out;
}

ExpSeriesPair duflo_density(LieAlgebra const& g, int order)
{
    if (order < 1)
        throw Error("duflo_density: order must be positive");
    auto parts = density_parts(g, order);
    return assemble_density(g, order, parts.y1, parts.y2, parts.z, parts.z);
}

ExpSeriesPair duflo_density_scaled(LieAlgebra const& g, Rational const& t, int order)
{
    if (order < 1)
        throw Error("duflo_density_scaled: order must be positive");
    if (t == 0)
        throw Error("duflo_density_scaled: t must be nonzero");
    std::size_t d = g.dim();
    DegreeCap block{d, 2 * d, order};
    auto parts = density_parts(g, order);
    std::vector<Polynomial> ty1, ty2, z_full, z_t;
    for (std::size_t k = 0; k < d; ++k)
    {
        ty1.push_back(t * parts.y1[k]);
        ty2.push_back(t * parts.y2[k]);
        z_full.push_back(scale_by_y_degree(parts.z[k], block, t, 0));
        z_t.push_back(scale_by_y_degree(parts.z[k], block, t, -1));
    }
    return assemble_density(g, order, ty1, ty2, z_full, z_t);
}

} // namespace kvstar
