#include "kvstar/kv.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace kvstar;
using freelie::FreeLieSeries;

namespace {

FreeLieSeries S(std::string_view text, int truncation)
{
    return freelie::parse_series(text, truncation);
}

std::vector<Polynomial> monomials_up_to(std::size_t d, int degree)
{
    std::vector<Polynomial> out;
    for (auto const& e : exponents_up_to(d, degree))
        out.push_back(Polynomial::monomial(e, 1));
    return out;
}

} // namespace

TEST(Kv1, LhsLowDegrees)
{
    auto lhs = kv1_lhs(3);
    // log(e^{y2} e^{y1}) = y2 + y1 + 1/2 [y2,y1] + ...
    EXPECT_EQ(lhs.homogeneous_part(1), FreeLieSeries(3));
    EXPECT_EQ(lhs.homogeneous_part(2), S("1/2 [y1,y2]", 3));
}

TEST(Kv1, LhsMatchesMatrixOracle)
{
    std::mt19937_64 rng(17);
    for (int t = 0; t < 5; ++t)
    {
        std::vector<oracle::QMat> gens{oracle::random_strict_upper(5, rng), oracle::random_strict_upper(5, rng)};
        auto log = oracle::log_unipotent(oracle::mul(oracle::exp_nilpotent(gens[1]), oracle::exp_nilpotent(gens[0])));
        auto expected = oracle::add(oracle::add(gens[0], gens[1]), log, -1);
        EXPECT_EQ(oracle::series_matrix(kv1_lhs(4), gens), expected);
    }
}

TEST(Kv1, ResidualOfZeroPairIsLhs)
{
    EXPECT_EQ(kv1_residual(FreeLieSeries(4), FreeLieSeries(4), 4), kv1_lhs(4));
}

TEST(Kv1, SolverDegreeOne)
{
    auto pair = solve_kv1(4);
    EXPECT_EQ(pair.order, 4);
    auto f1 = pair.F.homogeneous_part(1), g1 = pair.G.homogeneous_part(1);
    EXPECT_EQ(f1, S("1/4 y2", 4));
    EXPECT_EQ(g1, S("-1/4 y1", 4));
    // with F1 = a1 y1 + a2 y2 and G1 = b1 y1 + b2 y2
    Rational a2 = f1.coefficient({1}), b1 = g1.coefficient({0});
    EXPECT_EQ(a2 - b1, Rational(1, 2));
    // moving along the kernel keeps a2 - b1
    ASSERT_GE(pair.kernel.size(), 2u);
    for (auto const& k : pair.kernel[1])
        EXPECT_EQ(k.f.coefficient({1}), k.g.coefficient({0}));
}

TEST(Kv1, ZeroResidualAndSymmetry)
{
    for (int N = 2; N <= 5; ++N)
    {
        auto pair = solve_kv1(N);
        EXPECT_TRUE(kv1_residual(pair.F, pair.G, N).is_zero()) << N;
        EXPECT_LT(pair.F.max_degree(), N);
        for (int n = 1; n < N; ++n)
            if (pair.symmetric[n])
                EXPECT_EQ(pair.G.homogeneous_part(n), -freelie::swap_generators(pair.F.homogeneous_part(n)));
        for (int n = 1; n < N; ++n)
            for (auto const& k : pair.kernel[n])
                EXPECT_TRUE((bracket(FreeLieSeries::generator(0, N), k.f) + bracket(FreeLieSeries::generator(1, N), k.g))
                                .is_zero());
    }
    EXPECT_THROW(solve_kv1(1), Error);
}

TEST(Divergence, Examples)
{
    auto aff = builtin_algebra("aff1");
    EXPECT_TRUE(divergence(aff, {FreeLieSeries(3), FreeLieSeries(3)}, 3).series.is_zero());
    EXPECT_TRUE(divergence(aff, {S("y2", 3), FreeLieSeries(3)}, 3).series.is_zero());
    // tr(ad y1) = y1_0 on aff1
    EXPECT_EQ(divergence(aff, {S("y1", 3), FreeLieSeries(3)}, 3).series, Polynomial::variable(4, 0));
    EXPECT_EQ(divergence(aff, {FreeLieSeries(3), S("y2", 3)}, 3).series, Polynomial::variable(4, 2));
    auto sl2 = builtin_algebra("sl2");
    EXPECT_TRUE(divergence(sl2, {S("y1", 3), S("y2", 3)}, 3).series.is_zero());
}

TEST(Divergence, Linear)
{
    std::mt19937_64 rng(4);
    auto g = builtin_algebra("gl2");
    for (int t = 0; t < 5; ++t)
    {
        auto a = oracle::random_series(rng, 3, 3), b = oracle::random_series(rng, 3, 3);
        auto c = oracle::random_series(rng, 3, 3), d = oracle::random_series(rng, 3, 3);
        auto sum = divergence(g, {a + Rational(2) * c, b + Rational(2) * d}, 3).series;
        auto parts = divergence(g, {a, b}, 3).series + Rational(2) * divergence(g, {c, d}, 3).series;
        EXPECT_EQ(sum, parts);
    }
}

TEST(Kv2, AbelianVanishes)
{
    auto g = builtin_algebra("abelian3");
    EXPECT_TRUE(kv2_rhs(g, 4).series.is_zero());
    EXPECT_TRUE(kv2_residual(g, solve_kv1(5), 4).series.is_zero());
}

TEST(Kv2, ResidualZeroAfterSearch)
{
    for (auto name : {"aff1", "sl2", "gl2"})
    {
        std::vector<LieAlgebra> g{builtin_algebra(name)};
        auto pair = solve_kv(3, g, 2);
        EXPECT_TRUE(kv1_residual(pair.F, pair.G, 3).is_zero()) << name;
        EXPECT_TRUE(kv2_residual(g[0], pair, 2).series.is_zero()) << name;
    }
    auto family = kv2_search_family();
    auto pair = solve_kv(4, family, 3);
    EXPECT_TRUE(kv1_residual(pair.F, pair.G, 4).is_zero());
    for (auto const& g : family)
        EXPECT_TRUE(kv2_residual(g, pair, 3).series.is_zero()) << g.name();
}

TEST(Kv2, ArgumentChecks)
{
    std::vector<LieAlgebra> g{builtin_algebra("sl2")};
    EXPECT_THROW(solve_kv(3, g, 3), Error);
    EXPECT_THROW(solve_kv(3, g, 0), Error);
}

TEST(Dzt, VanishesForSolverPair)
{
    auto pair = solve_kv1(5);
    auto r = dzt_residual(pair, 4);
    EXPECT_TRUE(r.is_zero());
    EXPECT_FALSE(r.by_t_power.empty());

    auto broken = pair;
    broken.F += S("1/7 y2", 5);
    EXPECT_FALSE(dzt_residual(broken, 4).is_zero());
}

TEST(Homotopy, SweepAndNegativeControl)
{
    for (auto name : {"aff1", "sl2"})
    {
        auto g = builtin_algebra(name);
        std::vector<LieAlgebra> gs{g};
        auto pair = solve_kv(4, gs, 3);
        auto monomials = monomials_up_to(g.dim(), 2);
        for (auto const& f1 : monomials)
            for (auto const& f2 : monomials)
            {
                auto r = homotopy_check(g, pair, f1, f2, 3);
                EXPECT_TRUE(r.difference.is_zero()) << name << ": " << to_string(f1) << " , " << to_string(f2);
                EXPECT_EQ(r.difference, r.lhs - r.rhs);
            }
    }
    auto g = builtin_algebra("aff1");
    auto base = solve_kv1(4);
    auto pair = base;
    for (auto const& shift : base.kernel[1])
    {
        pair = base;
        pair.F += Rational(1, 3) * shift.f;
        pair.G += Rational(1, 3) * shift.g;
        if (!kv2_residual(g, pair, 1).series.is_zero())
            break;
    }
    ASSERT_TRUE(kv1_residual(pair.F, pair.G, 2).is_zero());
    ASSERT_FALSE(kv2_residual(g, pair, 1).series.is_zero());
    bool detected = false;
    for (auto const& f1 : monomials_up_to(2, 2))
        for (auto const& f2 : monomials_up_to(2, 2))
            detected = detected || !homotopy_check(g, pair, f1, f2, 1).difference.is_zero();
    EXPECT_TRUE(detected);
}
