#pragma once

// Kashiwara-Vergne equations, order by order.

#include "kvstar/freelie.hpp"
#include "kvstar/liealg.hpp"
#include "kvstar/polynomial.hpp"

#include <span>
#include <vector>

namespace kvstar {

using freelie::FreeLieSeries;
using freelie::TangentialDerivation;

class InfeasibleDegree : public Error
{
  public:
    using Error::Error;
};

struct KernelVector
{
    FreeLieSeries f;
    FreeLieSeries g;
};

struct KVPair
{
    FreeLieSeries F{1};
    FreeLieSeries G{1};
    /// KV1 holds through this degree; F and G have terms of degree < order.
    int order = 0;
    /// kernel[n]: (f, g) of degree n with [y1, f] + [y2, g] = 0 (index 0 unused). Adding one
    /// keeps KV1 through degree n + 1 only; higher degrees must be re-solved.
    std::vector<std::vector<KernelVector>> kernel;
    /// symmetric[n]: G_n = -F_n(y2, y1) could be imposed at degree n.
    std::vector<bool> symmetric;
    /// Degrees at which KV2 was imposed on the search algebras.
    int kv2_degree = 0;
};

/// y1 + y2 - log(e^{y2} e^{y1}) up to degree N.
FreeLieSeries kv1_lhs(int N);

/// kv1_lhs(N) - (1 - e^{-ad y1}) F - (e^{ad y2} - 1) G.
FreeLieSeries kv1_residual(FreeLieSeries const& F, FreeLieSeries const& G, int N);

/// Degree by degree exact solve with the symmetric tie-break G = -F(y2, y1).
KVPair solve_kv1(int N);

/// As solve_kv1, and additionally imposes KV2 through degree kv2_degree on every algebra in
/// `algebras` by moving along the KV1 kernel. Throws InfeasibleDegree if that system has no
/// solution.
KVPair solve_kv(int N, std::span<LieAlgebra const> algebras, int kv2_degree);

/// A polynomial in the coordinates of (y1, y2): variables [0, d) and [d, 2d).
struct TraceSeries
{
    Polynomial series;
    int truncation = 0;
};

/// tr(ad y1 d_{y1} u1) + tr(ad y2 d_{y2} u2), through total degree N.
TraceSeries divergence(LieAlgebra const& g, TangentialDerivation const& u, int N);

/// (1/2) tr(T(y1) + T(y2) - T(Z) - 1) with T(s) = s / (e^s - 1), through degree N.
TraceSeries kv2_rhs(LieAlgebra const& g, int N);

/// divergence(F, G) - kv2_rhs, through degree N.
TraceSeries kv2_residual(LieAlgebra const& g, KVPair const& pair, int N);

/// by_t_power[p] is the coefficient of t^p in d/dt Z_t - (<[y1,F_t],d_y1> + <[y2,G_t],d_y2>) Z_t;
/// it is homogeneous of degree p + 2.
struct DztResidual
{
    std::vector<FreeLieSeries> by_t_power;
    bool is_zero() const;
};

DztResidual dzt_residual(KVPair const& pair, int N);

struct HomotopyReport
{
    Polynomial lhs;
    Polynomial rhs;
    Polynomial difference;
};

/// lhs: the terms of f1 * f2 - f1 f2 of hbar-order 1..N.
/// rhs: the integral over t in [0, 1] of (S1 e^{y1}) *_t e^{y2} + e^{y1} *_t (S2 e^{y2}),
/// S1 = <x, [y1, F_t]> + tr(ad y1 d_{y1} F_t) and S2 likewise with (G_t, y2), read off
/// monomial by monomial and kept through hbar-order N. Needs F, G through degree N.
HomotopyReport homotopy_check(LieAlgebra const& g, KVPair const& pair, Polynomial const& f1,
                              Polynomial const& f2, int N);

std::vector<LieAlgebra> kv2_search_family();

} // namespace kvstar
