#pragma once

// U(g) in the PBW basis, the Duflo map I = sym o sqrt(j)(d), and the star
// product on S(g) pulled back through I.

#include "kvstar/liealg.hpp"
#include "kvstar/polynomial.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace kvstar {

/// Weakly increasing index word x_{i1} ... x_{ik}.
using IndexWord = std::vector<std::uint8_t>;

class EnvElement
{
  public:
    using Terms = std::map<IndexWord, Rational>;

    EnvElement() = default;
    static EnvElement one();
    static EnvElement word(IndexWord const& sorted_word, Rational const& c = 1);

    Terms const& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;
    Rational coefficient(IndexWord const& w) const;

    void add_term(IndexWord const& w, Rational const& c);
    EnvElement& operator+=(EnvElement const& other);
    EnvElement& operator-=(EnvElement const& other);
    EnvElement& operator*=(Rational const& c);

    friend bool operator==(EnvElement const& a, EnvElement const& b) { return a.terms_ == b.terms_; }

  private:
    Terms terms_;
};

EnvElement operator+(EnvElement a, EnvElement const& b);
EnvElement operator-(EnvElement a, EnvElement const& b);
EnvElement operator*(Rational const& c, EnvElement a);

std::string to_string(EnvElement const& e);

IndexWord exponent_to_word(Exponent const& e);
Exponent word_to_exponent(IndexWord const& w, std::size_t nvars);

enum class RewriteStrategy
{
    left_insertion,  ///< push letters in from the left, x_a * (sorted word)
    leftmost_descent, ///< rewrite the leftmost adjacent inversion first
    rightmost_descent,
};

/// Caches PBW reductions and the Duflo series for one algebra. Safe to share
/// between threads.
class Envelope
{
  public:
    explicit Envelope(LieAlgebra g, RewriteStrategy strategy = RewriteStrategy::left_insertion);

    LieAlgebra const& algebra() const { return g_; }

    EnvElement pbw_reduce(IndexWord const& word) const;
    EnvElement multiply(EnvElement const& a, EnvElement const& b) const;

    EnvElement symmetrize(Polynomial const& f) const;
    Polynomial unsymmetrize(EnvElement const& e) const;

    /// sqrt(j)(d) applied to f.
    Polynomial duflo_operator(Polynomial const& f) const;
    Polynomial duflo_operator_inverse(Polynomial const& h) const;

    EnvElement duflo_iso(Polynomial const& f) const;
    Polynomial duflo_iso_inverse(EnvElement const& e) const;

    Polynomial star(Polynomial const& f1, Polynomial const& f2) const;

  private:
    EnvElement reduce_left_insertion(std::uint8_t letter, IndexWord const& sorted) const;
    EnvElement reduce_descent(IndexWord const& word) const;
    EnvElement const& symmetrized_monomial(IndexWord const& sorted) const;
    Polynomial const& sqrt_j(int degree) const;

    LieAlgebra g_;
    RewriteStrategy strategy_;
    mutable std::mutex mutex_;
    mutable std::map<std::pair<std::uint8_t, IndexWord>, EnvElement> insertion_memo_;
    mutable std::map<IndexWord, EnvElement> descent_memo_;
    mutable std::map<IndexWord, EnvElement> sym_memo_;
    mutable std::map<int, Polynomial> sqrt_j_;
};

EnvElement pbw_reduce(LieAlgebra const& g, IndexWord const& word,
                      RewriteStrategy strategy = RewriteStrategy::left_insertion);
EnvElement symmetrize(LieAlgebra const& g, Polynomial const& f);
Polynomial unsymmetrize(LieAlgebra const& g, EnvElement const& e);
Polynomial duflo_operator(LieAlgebra const& g, Polynomial const& f);
EnvElement duflo_iso(LieAlgebra const& g, Polynomial const& f);
Polynomial duflo_iso_inverse(LieAlgebra const& g, EnvElement const& e);
Polynomial star(LieAlgebra const& g, Polynomial const& f1, Polynomial const& f2);
/// Star product for the constants t * f_ij^k.
Polynomial star_scaled(LieAlgebra const& g, Rational const& t, Polynomial const& f1,
                       Polynomial const& f2);

/// Variables of an ExpSeriesPair: x block [0, d), y1 block [d, 2d), y2 block [2d, 3d).
/// Truncated at joint y-degree N.
struct ExpSeriesPair
{
    std::size_t dim = 0;
    int order = 0;
    Polynomial series;

    DegreeCap y_cap() const { return DegreeCap{dim, 2 * dim, order}; }
};

/// sum over |a| + |b| <= N of y1^a y2^b / (a! b!) * (x^a star x^b).
ExpSeriesPair exp_star_expand(LieAlgebra const& g, int order);

/// D(y1, y2) e^{<x, Z(y1, y2)>} with D = sqrt j(y1) sqrt j(y2) / sqrt j(Z).
ExpSeriesPair duflo_density(LieAlgebra const& g, int order);

/// D(t y1, t y2) e^{<x, Z_t>}, Z_t = Z(t y1, t y2) / t, built from the unscaled constants.
ExpSeriesPair duflo_density_scaled(LieAlgebra const& g, Rational const& t, int order);

} // namespace kvstar
