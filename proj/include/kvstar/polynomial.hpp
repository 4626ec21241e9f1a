#pragma once

#include "kvstar/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kvstar {

using Exponent = std::vector<std::uint8_t>;

/// Degree bound on a contiguous block of variables. Used to truncate products of
/// generating functions in the y-blocks while leaving the x-block unbounded.
struct DegreeCap
{
    std::size_t first = 0;
    std::size_t count = 0;
    int max_degree = 0;
};

/// Sparse commutative polynomial with rational coefficients in a fixed number of
/// variables. Never stores a zero coefficient.
class Polynomial
{
  public:
    using Terms = std::map<Exponent, Rational>;

    explicit Polynomial(std::size_t nvars = 0) : nvars_(nvars) {}

    static Polynomial constant(std::size_t nvars, Rational const& c);
    static Polynomial variable(std::size_t nvars, std::size_t index);
    static Polynomial monomial(Exponent exponent, Rational const& c);

    std::size_t nvars() const { return nvars_; }
    Terms const& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// -1 for the zero polynomial.
    int degree() const;
    int degree_in(std::size_t first, std::size_t count) const;
    Rational coefficient(Exponent const& e) const;
    Rational constant_term() const;

    void add_term(Exponent const& e, Rational const& c);

    Polynomial& operator+=(Polynomial const& other);
    Polynomial& operator-=(Polynomial const& other);
    Polynomial& operator*=(Rational const& c);

    Polynomial derivative(std::size_t var) const;
    /// Mixed partial derivative d^alpha.
    Polynomial derivative(Exponent const& alpha) const;

    Polynomial homogeneous_part(int degree) const;
    Polynomial truncated(int max_degree) const;
    Polynomial truncated(DegreeCap const& cap) const;

    /// Replaces variable i by images[i]; all images share one variable count.
    /// Terms exceeding `cap` are dropped during the expansion.
    Polynomial substitute(std::span<Polynomial const> images,
                          std::optional<DegreeCap> cap = std::nullopt) const;

    /// Re-embeds into `new_nvars` variables, sending variable i to var_map[i].
    Polynomial remap(std::size_t new_nvars, std::span<std::size_t const> var_map) const;

    double evaluate(std::span<double const> point) const;

    friend bool operator==(Polynomial const& a, Polynomial const& b)
    {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

  private:
    std::size_t nvars_;
    Terms terms_;
};

Polynomial operator+(Polynomial a, Polynomial const& b);
Polynomial operator-(Polynomial a, Polynomial const& b);
Polynomial operator-(Polynomial a);
Polynomial operator*(Polynomial const& a, Polynomial const& b);
Polynomial operator*(Rational const& c, Polynomial a);

Polynomial multiply(Polynomial const& a, Polynomial const& b, std::optional<DegreeCap> cap);

/// Truncated power series exp(p) for p with zero constant term; terms above `cap` dropped.
Polynomial exp_series(Polynomial const& p, DegreeCap const& cap);

int exponent_degree(Exponent const& e);
/// All exponents in nvars variables of total degree <= max_degree, by degree then descending lex.
std::vector<Exponent> exponents_up_to(std::size_t nvars, int max_degree);
int exponent_degree(Exponent const& e, std::size_t first, std::size_t count);

using VariableNamer = std::function<std::string(std::size_t)>;

/// Canonical text form: terms by descending total degree, graded-lex within a degree
/// (larger power of an earlier variable first); coefficient 1 omitted, e.g. "x0*x1 + 1/2 x2".
std::string to_string(Polynomial const& p, VariableNamer const& name = {});

/// Grammar: rationals, x<k> variables, + - * ^ and parentheses; juxtaposition
/// multiplies ("1/2 x2"). Throws ParseError, including for x<k> with k >= nvars.
Polynomial parse_polynomial(std::string_view text, std::size_t nvars);

} // namespace kvstar
