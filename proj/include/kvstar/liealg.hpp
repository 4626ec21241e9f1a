#pragma once

#include "kvstar/freelie.hpp"
#include "kvstar/linsolve.hpp"
#include "kvstar/polynomial.hpp"
#include "kvstar/rational.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kvstar {

class AntisymmetryViolation : public Error
{
  public:
    using Error::Error;
};

class JacobiViolation : public Error
{
  public:
    JacobiViolation(std::array<std::size_t, 4> where, Rational value);
    /// (i, j, k, l) of the first nonzero Jacobi cycle found.
    std::array<std::size_t, 4> indices;
    Rational value;
};

class UnknownAlgebra : public Error
{
  public:
    using Error::Error;
};

/// Structure constants f_ij^k with [x_i, x_j] = sum_k f_ij^k x_k. Only i < j is
/// stored, so antisymmetry cannot be violated by a constructed value.
class LieAlgebra
{
  public:
    struct Bracket
    {
        std::size_t i;
        std::size_t j;
        std::size_t k;
        Rational coefficient;
    };

    /// Validates antisymmetry of the input listing and the Jacobi identity.
    static LieAlgebra make(std::size_t dim, std::span<Bracket const> brackets, std::string name = {},
                           std::vector<std::string> basis = {});

    std::size_t dim() const { return dim_; }
    std::string const& name() const { return name_; }
    std::vector<std::string> const& basis() const { return basis_; }

    /// f_ij^k for any i, j.
    Rational structure(std::size_t i, std::size_t j, std::size_t k) const;
    bool is_abelian() const;

    /// Same basis, constants multiplied by t.
    LieAlgebra scaled(Rational const& t) const;

  private:
    LieAlgebra(std::size_t dim) : dim_(dim), table_(dim * dim * dim) {}
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const
    {
        return (i * dim_ + j) * dim_ + k;
    }

    std::size_t dim_;
    std::vector<Rational> table_; // full antisymmetric table, filled from i<j entries
    std::string name_;
    std::vector<std::string> basis_;
};

/// abelian<d> (abelian = abelian3), heis3, aff1, sl2, gl2.
LieAlgebra builtin_algebra(std::string_view name);
std::vector<std::string> builtin_algebra_names();

/// The JSON file format: {"dim", "basis", "brackets": [{"i","j","coeffs":{"k":"q"}}]}.
LieAlgebra parse_lie_algebra_json(std::string_view text);
LieAlgebra load_lie_algebra_json(std::string const& path);
std::string to_json(LieAlgebra const& g);

/// "builtin:NAME" or a path to a JSON file.
LieAlgebra resolve_lie_algebra(std::string_view source);

/// (ad x)_{kj} = sum_i x_i f_ij^k.
RationalMatrix ad_matrix(LieAlgebra const& g, std::span<Rational const> x);

using PolyMatrix = std::vector<std::vector<Polynomial>>;

/// ad of a symbolic vector whose i-th coordinate is variable first_var + i in nvars variables.
PolyMatrix ad_matrix_symbolic(LieAlgebra const& g, std::size_t nvars, std::size_t first_var);

/// {f1, f2} = sum f_ij^k x_k d_i f1 d_j f2, on polynomials in g.dim() variables.
Polynomial poisson_bracket(LieAlgebra const& g, Polynomial const& f1, Polynomial const& f2);

/// Bracket of g-valued polynomial vectors.
std::vector<Polynomial> lie_bracket(LieAlgebra const& g, std::span<Polynomial const> a,
                                    std::span<Polynomial const> b,
                                    std::optional<DegreeCap> cap = std::nullopt);

enum class AnalyticKind
{
    sqrt_j, ///< sqrt(det((1 - e^{-ad x}) / ad x)); the mode is ignored
    todd,   ///< ad x / (e^{ad x} - 1)
    gamma,  ///< (1 - e^{-ad x}) / ad x
};

enum class AnalyticMode
{
    trace,    ///< tr f(ad x)
    det_sqrt, ///< exp((1/2) tr log f(ad x)) = sqrt(det f(ad x))
};

AnalyticKind parse_analytic_kind(std::string_view name);
AnalyticMode parse_analytic_mode(std::string_view name);

/// A truncated power series in the coordinates of x in g.
struct AdSeriesScalar
{
    Polynomial series;
    int truncation = 0;

    double evaluate(std::span<double const> x) const { return series.evaluate(x); }
};

AdSeriesScalar ad_analytic_series(LieAlgebra const& g, AnalyticKind kind, AnalyticMode mode,
                                  int degree);

/// (1/2) tr log f(ad x), the logarithm of the det_sqrt series.
Polynomial half_log_det_series(LieAlgebra const& g, AnalyticKind kind, int degree);

/// Coefficients of the univariate series f(s) up to s^degree.
std::vector<Rational> analytic_coefficients(AnalyticKind kind, int degree);

/// Image of s under the Lie map y_i -> assignment[i] (g-valued polynomial vectors).
std::vector<Polynomial> evaluate_free_lie(LieAlgebra const& g, freelie::FreeLieSeries const& s,
                                          std::span<std::vector<Polynomial> const> assignment,
                                          std::optional<DegreeCap> cap = std::nullopt);

/// Symbolic coordinate block: component k is variable first_var + k (nvars variables total).
std::vector<Polynomial> coordinate_block(LieAlgebra const& g, std::size_t nvars, std::size_t first_var);

} // namespace kvstar
