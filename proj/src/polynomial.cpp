#include "kvstar/polynomial.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace kvstar {

int exponent_degree(Exponent const& e)
{
    int d = 0;
    for (auto v : e)
        d += v;
    return d;
}

namespace {

void fill_exponents(Exponent& e, std::size_t i, int left, std::vector<Exponent>& out)
{
    if (i + 1 == e.size())
    {
        e[i] = static_cast<std::uint8_t>(left);
        out.push_back(e);
        return;
    }
    for (int a = left; a >= 0; --a)
    {
        e[i] = static_cast<std::uint8_t>(a);
        fill_exponents(e, i + 1, left - a, out);
    }
}

} // namespace

std::vector<Exponent> exponents_up_to(std::size_t nvars, int max_degree)
{
    std::vector<Exponent> out;
    if (nvars == 0)
    {
        out.emplace_back();
        return out;
    }
    Exponent e(nvars, 0);
    for (int deg = 0; deg <= max_degree; ++deg)
        fill_exponents(e, 0, deg, out);
    return out;
}

int exponent_degree(Exponent const& e, std::size_t first, std::size_t count)
{
    int d = 0;
    for (std::size_t i = first; i < first + count && i < e.size(); ++i)
        d += e[i];
    return d;
}

Polynomial Polynomial::constant(std::size_t nvars, Rational const& c)
{
    Polynomial p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index)
{
    assert(index < nvars);
    Polynomial p(nvars);
    Exponent e(nvars, 0);
    e[index] = 1;
    p.add_term(e, Rational(1));
    return p;
}

Polynomial Polynomial::monomial(Exponent exponent, Rational const& c)
{
    Polynomial p(exponent.size());
    p.add_term(exponent, c);
    return p;
}

int Polynomial::degree() const
{
    int d = -1;
    for (auto const& [e, c] : terms_)
        d = std::max(d, exponent_degree(e));
    return d;
}

int Polynomial::degree_in(std::size_t first, std::size_t count) const
{
    int d = -1;
    for (auto const& [e, c] : terms_)
        d = std::max(d, exponent_degree(e, first, count));
    return d;
}

Rational Polynomial::coefficient(Exponent const& e) const
{
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

Rational Polynomial::constant_term() const
{
    return coefficient(Exponent(nvars_, 0));
}

void Polynomial::add_term(Exponent const& e, Rational const& c)
{
    assert(e.size() == nvars_);
    if (c == 0)
        return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted)
    {
        it->second += c;
        if (it->second == 0)
            terms_.erase(it);
    }
}

Polynomial& Polynomial::operator+=(Polynomial const& other)
{
    assert(other.nvars_ == nvars_);
    for (auto const& [e, c] : other.terms_)
        add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(Polynomial const& other)
{
    assert(other.nvars_ == nvars_);
    for (auto const& [e, c] : other.terms_)
        add_term(e, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(Rational const& c)
{
    if (c == 0)
    {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_)
        v *= c;
    return *this;
}

Polynomial Polynomial::derivative(std::size_t var) const
{
    Polynomial r(nvars_);
    for (auto const& [e, c] : terms_)
    {
        if (e[var] == 0)
            continue;
        Exponent f = e;
        --f[var];
        r.terms_.emplace(std::move(f), c * e[var]);
    }
    return r;
}

Polynomial Polynomial::derivative(Exponent const& alpha) const
{
    assert(alpha.size() == nvars_);
    Polynomial r(nvars_);
    for (auto const& [e, c] : terms_)
    {
        Exponent f = e;
        Rational coeff = c;
        bool dead = false;
        for (std::size_t i = 0; i < nvars_ && !dead; ++i)
        {
            if (alpha[i] > e[i])
            {
                dead = true;
                break;
            }
            for (unsigned k = 0; k < alpha[i]; ++k)
                coeff *= e[i] - k;
            f[i] = static_cast<std::uint8_t>(e[i] - alpha[i]);
        }
        if (!dead)
            r.terms_.emplace(std::move(f), coeff);
    }
    return r;
}

Polynomial Polynomial::homogeneous_part(int degree) const
{
    Polynomial r(nvars_);
    for (auto const& [e, c] : terms_)
        if (exponent_degree(e) == degree)
            r.terms_.emplace(e, c);
    return r;
}

Polynomial Polynomial::truncated(int max_degree) const
{
    Polynomial r(nvars_);
    for (auto const& [e, c] : terms_)
        if (exponent_degree(e) <= max_degree)
            r.terms_.emplace(e, c);
    return r;
}

Polynomial Polynomial::truncated(DegreeCap const& cap) const
{
    Polynomial r(nvars_);
    for (auto const& [e, c] : terms_)
        if (exponent_degree(e, cap.first, cap.count) <= cap.max_degree)
            r.terms_.emplace(e, c);
    return r;
}

Polynomial Polynomial::substitute(std::span<Polynomial const> images,
                                  std::optional<DegreeCap> cap) const
{
    assert(images.size() == nvars_);
    std::size_t target = images.empty() ? 0 : images.front().nvars();
    // powers[i][k] = images[i]^k, built lazily
    std::vector<std::vector<Polynomial>> powers(nvars_);
    auto power = [&](std::size_t i, unsigned k) -> Polynomial const& {
        auto& table = powers[i];
        if (table.empty())
            table.push_back(Polynomial::constant(target, Rational(1)));
        while (table.size() <= k)
            table.push_back(multiply(table.back(), images[i], cap));
        return table[k];
    };
    Polynomial r(target);
    for (auto const& [e, c] : terms_)
    {
        Polynomial term = Polynomial::constant(target, c);
        for (std::size_t i = 0; i < nvars_ && !term.is_zero(); ++i)
            if (e[i] > 0)
                term = multiply(term, power(i, e[i]), cap);
        r += term;
    }
    return r;
}

Polynomial Polynomial::remap(std::size_t new_nvars, std::span<std::size_t const> var_map) const
{
    assert(var_map.size() == nvars_);
    Polynomial r(new_nvars);
    for (auto const& [e, c] : terms_)
    {
        Exponent f(new_nvars, 0);
        for (std::size_t i = 0; i < nvars_; ++i)
            f[var_map[i]] = static_cast<std::uint8_t>(f[var_map[i]] + e[i]);
        r.add_term(f, c);
    }
    return r;
}

double Polynomial::evaluate(std::span<double const> point) const
{
    assert(point.size() == nvars_);
    double acc = 0.0;
    for (auto const& [e, c] : terms_)
    {
        double m = c.get_d();
        for (std::size_t i = 0; i < nvars_; ++i)
            for (unsigned k = 0; k < e[i]; ++k)
                m *= point[i];
        acc += m;
    }
    return acc;
}

Polynomial operator+(Polynomial a, Polynomial const& b)
{
    a += b;
    return a;
}

Polynomial operator-(Polynomial a, Polynomial const& b)
{
    a -= b;
    return a;
}

Polynomial operator-(Polynomial a)
{
    a *= Rational(-1);
    return a;
}

Polynomial multiply(Polynomial const& a, Polynomial const& b, std::optional<DegreeCap> cap)
{
    assert(a.nvars() == b.nvars());
    std::size_t n = a.nvars();
    Polynomial r(n);
    Exponent e(n);
    for (auto const& [ea, ca] : a.terms())
    {
        int da = cap ? exponent_degree(ea, cap->first, cap->count) : 0;
        if (cap && da > cap->max_degree)
            continue;
        for (auto const& [eb, cb] : b.terms())
        {
            if (cap && da + exponent_degree(eb, cap->first, cap->count) > cap->max_degree)
                continue;
            for (std::size_t i = 0; i < n; ++i)
                e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

Polynomial operator*(Polynomial const& a, Polynomial const& b)
{
    return multiply(a, b, std::nullopt);
}

Polynomial operator*(Rational const& c, Polynomial a)
{
    a *= c;
    return a;
}

Polynomial exp_series(Polynomial const& p, DegreeCap const& cap)
{
    assert(p.constant_term() == 0);
    Polynomial result = Polynomial::constant(p.nvars(), Rational(1));
    Polynomial power = result;
    for (int k = 1; k <= cap.max_degree; ++k)
    {
        power = multiply(power, p, cap);
        power *= Rational(1, k);
        if (power.is_zero())
            break;
        result += power;
    }
    return result;
}

namespace {

// Larger degree first; within a degree, graded-lex descending.
bool print_before(Exponent const& a, Exponent const& b)
{
    int da = exponent_degree(a), db = exponent_degree(b);
    if (da != db)
        return da > db;
    return a > b;
}

} // namespace

std::string to_string(Polynomial const& p, VariableNamer const& name)
{
    if (p.is_zero())
        return "0";
    auto var = [&](std::size_t i) { return name ? name(i) : "x" + std::to_string(i); };
    std::vector<std::pair<Exponent, Rational>> terms(p.terms().begin(), p.terms().end());
    std::sort(terms.begin(), terms.end(),
              [](auto const& a, auto const& b) { return print_before(a.first, b.first); });
    std::ostringstream out;
    bool first = true;
    for (auto const& [e, c] : terms)
    {
        Rational mag = abs(c);
        if (first)
            out << (c < 0 ? "-" : "");
        else
            out << (c < 0 ? " - " : " + ");
        first = false;
        std::string mono;
        for (std::size_t i = 0; i < e.size(); ++i)
        {
            if (e[i] == 0)
                continue;
            if (!mono.empty())
                mono += "*";
            mono += var(i);
            if (e[i] > 1)
                mono += "^" + std::to_string(e[i]);
        }
        if (mono.empty())
            out << to_string(mag);
        else if (mag == 1)
            out << mono;
        else
            out << to_string(mag) << " " << mono;
    }
    return out.str();
}

} // namespace kvstar
