#pragma once

// Exact arithmetic in the degree-completed free Lie algebra on a few generators
// (in practice y1, y2), written in the Lyndon basis with standard bracketing.

#include "kvstar/rational.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace kvstar::freelie {

/// Letters 0, 1, ... stand for y1, y2, ...
using Word = std::vector<std::uint8_t>;

/// Orders words by length, then lexicographically.
struct GradedLex
{
    bool operator()(Word const& a, Word const& b) const
    {
        if (a.size() != b.size())
            return a.size() < b.size();
        return a < b;
    }
};

bool is_lyndon(Word const& w);

/// Lyndon words of exactly `degree` letters over `num_generators` letters, lexicographic.
std::vector<Word> lyndon_words(unsigned num_generators, unsigned degree);

/// (1/n) sum_{d|n} mu(d) k^(n/d)
std::size_t witt_dimension(unsigned num_generators, unsigned degree);

/// w = u v with v the longest proper Lyndon suffix. Requires |w| >= 2.
std::pair<Word, Word> standard_factorization(Word const& w);

/// Standard bracketing of a Lyndon word, e.g. "[y1,[y1,y2]]".
std::string bracket_string(Word const& w);

class FreeLieSeries
{
  public:
    using Terms = std::map<Word, Rational, GradedLex>;

    explicit FreeLieSeries(int truncation) : truncation_(truncation) {}

    static FreeLieSeries generator(unsigned index, int truncation);
    /// The basis element attached to a Lyndon word.
    static FreeLieSeries basis(Word const& lyndon_word, int truncation, Rational const& c = 1);

    int truncation() const { return truncation_; }
    Terms const& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Rational coefficient(Word const& w) const;

    /// Lowest and highest degree present; 0 for the zero series.
    int min_degree() const;
    int max_degree() const;

    FreeLieSeries homogeneous_part(int degree) const;
    /// Copy truncated to min(truncation(), degree).
    FreeLieSeries truncated(int degree) const;

    void add_term(Word const& w, Rational const& c);

    FreeLieSeries& operator+=(FreeLieSeries const& other);
    FreeLieSeries& operator-=(FreeLieSeries const& other);
    FreeLieSeries& operator*=(Rational const& c);

    friend bool operator==(FreeLieSeries const& a, FreeLieSeries const& b)
    {
        return a.terms_ == b.terms_;
    }

  private:
    int truncation_;
    Terms terms_;
};

FreeLieSeries operator+(FreeLieSeries a, FreeLieSeries const& b);
FreeLieSeries operator-(FreeLieSeries a, FreeLieSeries const& b);
FreeLieSeries operator-(FreeLieSeries a);
FreeLieSeries operator*(Rational const& c, FreeLieSeries a);

/// Lie bracket, truncated to the smaller of the two truncation degrees.
FreeLieSeries bracket(FreeLieSeries const& a, FreeLieSeries const& b);

/// log(e^a e^b) up to `degree`. Throws Error for degree 0.
FreeLieSeries log_exp_product(FreeLieSeries const& a, FreeLieSeries const& b, int degree);

enum class AdSeries
{
    one_minus_exp_neg_ad, ///< (1 - e^{-ad x}) = sum_{k>=1} (-1)^{k+1} ad^k / k!
    exp_ad_minus_one,     ///< (e^{ad x} - 1) = sum_{k>=1} ad^k / k!
};

AdSeries parse_ad_series(std::string_view name);

FreeLieSeries series_of_ad(AdSeries kind, FreeLieSeries const& direction,
                           FreeLieSeries const& target, int degree);

/// The derivation of the free Lie algebra sending generator i to images[i], applied to s.
FreeLieSeries apply_derivation(FreeLieSeries const& s, std::span<FreeLieSeries const> images,
                               int degree);

/// Homomorphism sending generator i to images[i] (images without constant term).
FreeLieSeries substitute(FreeLieSeries const& s, std::span<FreeLieSeries const> images,
                         int degree);

struct TangentialDerivation
{
    FreeLieSeries u1;
    FreeLieSeries u2;
};

/// u(y_i) = [y_i, u_i], extended by the Leibniz rule.
FreeLieSeries apply_tangential(TangentialDerivation const& u, FreeLieSeries const& s);

/// The derivation <v, d/dy_i>: each occurrence of y_i replaced by replacements[i], one at a time.
FreeLieSeries directional_substitute(FreeLieSeries const& s,
                                     std::span<FreeLieSeries const> replacements, int degree);

/// Generator swap y1 <-> y2.
FreeLieSeries swap_generators(FreeLieSeries const& s);

/// Canonical text form, e.g. "y1 + y2 + 1/2 [y1,y2]".
std::string to_string(FreeLieSeries const& s);

/// Reads the canonical text form back (degree-1 terms "y1", brackets "[a,b]" of Lyndon words).
FreeLieSeries parse_series(std::string_view text, int truncation);

// Free associative algebra view, used for primitivity checks and Lyndon decomposition.
using WordPolynomial = std::map<Word, Rational>;

WordPolynomial expand_basis(Word const& lyndon_word);
WordPolynomial to_associative(FreeLieSeries const& s);

/// Inverse of to_associative on Lie elements. Throws Error if p is not a Lie polynomial.
FreeLieSeries from_associative(WordPolynomial p, int truncation);

} // namespace kvstar::freelie
