#pragma once

// Monte-Carlo Kontsevich weights for graphs in G_{n,2}, with the ground points at
// 0 and 1 and aerial points sampled through a per-point chart of the upper half-plane.

#include "kvstar/graphs.hpp"
#include "kvstar/liealg.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace kvstar {

using Complex = std::complex<double>;

class CoincidentPoints : public Error
{
  public:
    using Error::Error;
};

class DegenerateForm : public Error
{
  public:
    using Error::Error;
};

/// (1/2pi) arg((z1 - z2) / (conj(z1) - z2)) in [0, 1). z1 is the edge source.
double propagator_angle(Complex z1, Complex z2);

/// Partial derivatives of propagator_angle by (x1, y1, x2, y2).
std::array<double, 4> propagator_gradient(Complex z1, Complex z2);

/// (arg z / pi, arg(z - 1) / pi); maps the upper half-plane onto 0 < a < b < 1.
std::array<double, 2> two_angle_chart(Complex z);
Complex two_angle_chart_inverse(double a, double b);
/// |d(x, y) / d(a, b)| of the inverse chart.
double two_angle_jacobian(Complex z);

struct McOptions
{
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

struct WeightEstimate
{
    double mean = 0;
    double std_error = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::string graph;
    double elapsed_ms = 0;
};

/// Samples per RNG stream; chunk c draws from a generator seeded with (seed, c).
inline constexpr std::uint64_t mc_chunk_size = 1 << 14;

/// Integral of the pulled-back density det(d phi_e / d(x_v, y_v)) over C_{n,2}^+.
/// Rows are edges ordered by (source, slot); columns are (x_0, y_0, x_1, y_1, ...).
/// OpenMP over chunks; the result does not depend on the worker count.
WeightEstimate mc_weight(AdmissibleGraph const& graph, McOptions const& options);
/// Single-threaded reference, bit-identical to mc_weight.
WeightEstimate mc_weight_serial(AdmissibleGraph const& graph, McOptions const& options);

enum class WheelIntegrand
{
    density,
    absolute_density, ///< |density|; cannot cancel, so a working integrator gives a positive value
};

/// k rim vertices v_j -> v_{j+1} with spokes v_j -> i, where i is a fixed point of the
/// upper half-plane.
WeightEstimate wheel_weight_check(unsigned k, McOptions const& options,
                                  WheelIntegrand integrand = WheelIntegrand::density);

struct FloatCoefficient
{
    double value = 0;
    double std_error = 0;
};

struct GraphStarTerm
{
    AdmissibleGraph canonical;
    std::size_t multiplicity = 0;
    WeightEstimate weight;
    Polynomial operator_value;
};

struct GraphStarResult
{
    std::size_t nvars = 0;
    std::map<Exponent, FloatCoefficient> terms;
    std::vector<GraphStarTerm> graphs;
};

/// Weight estimates keyed by canonical graph. The seed of each entry is derived from the
/// base seed and the canonical text form, so it does not depend on lookup order.
class WeightTable
{
  public:
    explicit WeightTable(McOptions options) : options_(options) {}

    McOptions const& options() const { return options_; }
    WeightEstimate const& get(AdmissibleGraph const& canonical);
    std::map<AdmissibleGraph, WeightEstimate> const& entries() const { return entries_; }

  private:
    McOptions options_;
    std::map<AdmissibleGraph, WeightEstimate> entries_;
};

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

/// sum_{n <= order} 1 / (n! 2^n) sum_Gamma w_Gamma B_Gamma(f1, f2) over labeled graphs with
/// aerial in-degree at most 1. Isomorphic graphs share one weight estimate.
GraphStarResult graph_star(LieAlgebra const& g, Polynomial const& f1, Polynomial const& f2, int order,
                           WeightTable& weights);

/// The terms of star(f1, f2) of order at most `order` in hbar: for homogeneous inputs the
/// order-n term is the component of degree deg f1 + deg f2 - n.
Polynomial star_up_to_order(LieAlgebra const& g, Polynomial const& f1, Polynomial const& f2, int order);

} // namespace kvstar
