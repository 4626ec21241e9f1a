#include "kvstar/liealg.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <complex>
#include <fstream>

using namespace kvstar;

namespace {

Polynomial P(std::string_view text, std::size_t d)
{
    return parse_polynomial(text, d);
}

using Cd = std::complex<double>;

Cd analytic(AnalyticKind kind, Cd s)
{
    if (std::abs(s) < 1e-12)
        return 1.0;
    switch (kind)
    {
    case AnalyticKind::sqrt_j:
    case AnalyticKind::gamma: return (1.0 - std::exp(-s)) / s;
    case AnalyticKind::todd: return s / (std::exp(s) - 1.0);
    }
    return 0.0;
}

// Numeric tr f(ad x) or sqrt(det f(ad x)) from the eigenvalues of ad x.
double numeric_series(LieAlgebra const& g, AnalyticKind kind, AnalyticMode mode, std::vector<double> const& x)
{
    std::size_t d = g.dim();
    Eigen::MatrixXd ad = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k)
                ad(k, j) += x[i] * g.structure(i, j, k).get_d();
    Eigen::EigenSolver<Eigen::MatrixXd> es(ad);
    auto ev = es.eigenvalues();
    if (kind == AnalyticKind::sqrt_j || mode == AnalyticMode::det_sqrt)
    {
        Cd det = 1.0;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            det *= analytic(kind, ev[i]);
        return std::sqrt(det).real();
    }
    Cd tr = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        tr += analytic(kind, ev[i]);
    return tr.real();
}

} // namespace

TEST(Make, AcceptsAbelianAndSl2)
{
    EXPECT_TRUE(builtin_algebra("abelian3").is_abelian());
    auto sl2 = builtin_algebra("sl2");
    EXPECT_EQ(sl2.structure(0, 1, 2), Rational(1));
    EXPECT_EQ(sl2.structure(2, 0, 0), Rational(2));
    EXPECT_EQ(sl2.structure(2, 1, 1), Rational(-2));
    EXPECT_EQ(sl2.structure(1, 0, 2), Rational(-1));
    for (auto const& name : builtin_algebra_names())
        EXPECT_NO_THROW(builtin_algebra(name));
}

TEST(Make, RejectsJacobiViolation)
{
    std::vector<LieAlgebra::Bracket> br{{0, 1, 2, 1}, {0, 2, 2, 1}, {1, 2, 0, 1}};
    try
    {
        LieAlgebra::make(3, br);
        FAIL() << "expected JacobiViolation";
    }
    catch (JacobiViolation const& e)
    {
        auto [i, j, k, l] = e.indices;
        Rational f[3][3][3];
        for (auto const& b : br)
        {
            f[b.i][b.j][b.k] = b.coefficient;
            f[b.j][b.i][b.k] = -b.coefficient;
        }
        Rational cycle = 0;
        for (std::size_t m = 0; m < 3; ++m)
            cycle += f[i][j][m] * f[m][k][l] + f[j][k][m] * f[m][i][l] + f[k][i][m] * f[m][j][l];
        EXPECT_NE(cycle, 0);
        EXPECT_EQ(cycle, e.value);
    }
}

TEST(Make, RejectsInconsistentAntisymmetry)
{
    std::vector<LieAlgebra::Bracket> br{{0, 1, 1, 1}, {1, 0, 1, 1}};
    EXPECT_THROW(LieAlgebra::make(2, br), AntisymmetryViolation);
    std::vector<LieAlgebra::Bracket> diag{{0, 0, 1, 1}};
    EXPECT_THROW(LieAlgebra::make(2, diag), Error);
    std::vector<LieAlgebra::Bracket> range{{0, 3, 1, 1}};
    EXPECT_THROW(LieAlgebra::make(2, range), Error);
}

TEST(Make, BuiltinsSatisfyJacobiBruteForce)
{
    for (auto const& name : builtin_algebra_names())
    {
        auto g = builtin_algebra(name);
        std::size_t d = g.dim();
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
            {
                EXPECT_EQ(g.structure(i, j, 0) + g.structure(j, i, 0), 0);
                for (std::size_t k = 0; k < d; ++k)
                    for (std::size_t l = 0; l < d; ++l)
                    {
                        Rational s = 0;
                        for (std::size_t m = 0; m < d; ++m)
                            s += g.structure(i, j, m) * g.structure(m, k, l) + g.structure(j, k, m) * g.structure(m, i, l) +
                                 g.structure(k, i, m) * g.structure(m, j, l);
                        EXPECT_EQ(s, 0) << name;
                    }
            }
    }
}

TEST(AdMatrix, Examples)
{
    auto ab = builtin_algebra("abelian3");
    std::vector<Rational> x{1, 2, 3};
    for (auto const& row : ad_matrix(ab, x))
        for (auto const& v : row)
            EXPECT_EQ(v, 0);

    auto aff = builtin_algebra("aff1");
    auto m = ad_matrix(aff, std::vector<Rational>{1, 0});
    EXPECT_EQ(m[1][1], Rational(1));
    EXPECT_EQ(m[0][0], 0);
    EXPECT_EQ(m[0][1], 0);
    EXPECT_EQ(m[1][0], 0);

    auto sl2 = builtin_algebra("sl2");
    auto h = ad_matrix(sl2, std::vector<Rational>{0, 0, 1});
    EXPECT_EQ(h[0][0], Rational(2));
    EXPECT_EQ(h[1][1], Rational(-2));
    EXPECT_EQ(h[2][2], Rational(0));
}

TEST(AdMatrix, Linear)
{
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> c(-5, 5);
    auto g = builtin_algebra("gl2");
    for (int t = 0; t < 20; ++t)
    {
        std::vector<Rational> x(4), y(4), s(4);
        Rational a = c(rng);
        for (int i = 0; i < 4; ++i)
        {
            x[i] = c(rng);
            y[i] = c(rng);
            s[i] = a * x[i] + y[i];
        }
        auto mx = ad_matrix(g, x), my = ad_matrix(g, y), ms = ad_matrix(g, s);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                EXPECT_EQ(ms[i][j], a * mx[i][j] + my[i][j]);
    }
}

TEST(Poisson, Examples)
{
    for (auto const& name : builtin_algebra_names())
    {
        auto g = builtin_algebra(name);
        std::size_t d = g.dim();
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
            {
                Polynomial expected(d);
                for (std::size_t k = 0; k < d; ++k)
                    expected += g.structure(i, j, k) * Polynomial::variable(d, k);
                EXPECT_EQ(poisson_bracket(g, Polynomial::variable(d, i), Polynomial::variable(d, j)), expected);
            }
        EXPECT_TRUE(poisson_bracket(g, Polynomial::constant(d, 7), Polynomial::variable(d, 0)).is_zero());
    }
    auto sl2 = builtin_algebra("sl2");
    auto x0 = P("x0", 3), x1 = P("x1", 3), x2 = P("x2", 3);
    auto jac = poisson_bracket(sl2, x0, poisson_bracket(sl2, x1, x2)) + poisson_bracket(sl2, x1, poisson_bracket(sl2, x2, x0)) +
               poisson_bracket(sl2, x2, poisson_bracket(sl2, x0, x1));
    EXPECT_TRUE(jac.is_zero());
}

TEST(Poisson, LeibnizAntisymmetryJacobiRandom)
{
    std::mt19937_64 rng(12);
    for (auto name : {"sl2", "aff1", "heis3", "gl2"})
    {
        auto g = builtin_algebra(name);
        std::size_t d = g.dim();
        for (int t = 0; t < 10; ++t)
        {
            auto f = oracle::random_polynomial(rng, d, 3, 3);
            auto a = oracle::random_polynomial(rng, d, 2, 3);
            auto b = oracle::random_polynomial(rng, d, 2, 3);
            EXPECT_EQ(poisson_bracket(g, f, a * b), poisson_bracket(g, f, a) * b + a * poisson_bracket(g, f, b));
            EXPECT_EQ(poisson_bracket(g, f, a), -poisson_bracket(g, a, f));
            auto jac = poisson_bracket(g, f, poisson_bracket(g, a, b)) + poisson_bracket(g, a, poisson_bracket(g, b, f)) +
                       poisson_bracket(g, b, poisson_bracket(g, f, a));
            EXPECT_TRUE(jac.is_zero()) << name;
        }
    }
}

TEST(AnalyticSeries, Examples)
{
    auto ab = ad_analytic_series(builtin_algebra("abelian3"), AnalyticKind::sqrt_j, AnalyticMode::det_sqrt, 6);
    EXPECT_EQ(to_string(ab.series), "1");

    auto aff = ad_analytic_series(builtin_algebra("aff1"), AnalyticKind::sqrt_j, AnalyticMode::det_sqrt, 2);
    EXPECT_EQ(aff.series.homogeneous_part(1), P("-1/4 x0", 2));
    EXPECT_EQ(aff.series.constant_term(), 1);
    // (1/2) log((1 - e^{-s})/s) = -s/4 + s^2/48 + ..., exponentiated: 1 - s/4 + s^2/32 + s^2/48
    EXPECT_EQ(aff.series.homogeneous_part(2), P("5/96 x0^2", 2));

    auto sl2 = builtin_algebra("sl2");
    auto sj = ad_analytic_series(sl2, AnalyticKind::sqrt_j, AnalyticMode::det_sqrt, 4);
    EXPECT_TRUE(sj.series.homogeneous_part(1).is_zero());
    EXPECT_EQ(sj.series.homogeneous_part(2), P("1/6 x0*x1 + 1/6 x2^2", 3));
    std::vector<double> x{0, 0, 0.1};
    EXPECT_NEAR(sj.evaluate(x), numeric_series(sl2, AnalyticKind::sqrt_j, AnalyticMode::det_sqrt, x), 1e-8);
}

TEST(AnalyticSeries, NilpotentTerminatesUnimodularHasNoLinearTerm)
{
    auto h = ad_analytic_series(builtin_algebra("heis3"), AnalyticKind::sqrt_j, AnalyticMode::det_sqrt, 8);
    EXPECT_EQ(to_string(h.series), "1");
    auto t = ad_analytic_series(builtin_algebra("heis3"), AnalyticKind::todd, AnalyticMode::trace, 8);
    EXPECT_EQ(to_string(t.series), "3");
    for (auto name : {"sl2", "heis3"})
    {
        auto s = ad_analytic_series(builtin_algebra(name), AnalyticKind::sqrt_j, AnalyticMode::det_sqrt, 3);
        EXPECT_TRUE(s.series.homogeneous_part(1).is_zero()) << name;
    }
}

TEST(AnalyticSeries, NumericAgreement)
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<std::pair<AnalyticKind, AnalyticMode>> cases{
        {AnalyticKind::sqrt_j, AnalyticMode::det_sqrt}, {AnalyticKind::todd, AnalyticMode::trace},
        {AnalyticKind::todd, AnalyticMode::det_sqrt},   {AnalyticKind::gamma, AnalyticMode::trace},
        {AnalyticKind::gamma, AnalyticMode::det_sqrt}};
    for (auto name : {"aff1", "sl2", "gl2", "heis3"})
    {
        auto g = builtin_algebra(name);
        for (auto [kind, mode] : cases)
        {
            auto s = ad_analytic_series(g, kind, mode, 6);
            for (int t = 0; t < 20; ++t)
            {
                std::vector<double> x(g.dim());
                double norm = 0;
                for (auto& v : x)
                {
                    v = u(rng);
                    norm += v * v;
                }
                for (auto& v : x)
                    v *= 0.1 / std::sqrt(norm);
                EXPECT_NEAR(s.evaluate(x), numeric_series(g, kind, mode, x), 1e-6) << name;
            }
        }
    }
}

TEST(AnalyticSeries, ParseNames)
{
    EXPECT_EQ(parse_analytic_kind("todd"), AnalyticKind::todd);
    EXPECT_EQ(parse_analytic_mode("det_sqrt"), AnalyticMode::det_sqrt);
    EXPECT_THROW(parse_analytic_kind("cosh"), Error);
    EXPECT_THROW(parse_analytic_mode("log"), Error);
}

TEST(EvaluateFreeLie, Examples)
{
    using freelie::FreeLieSeries;
    auto s = freelie::parse_series("[y1,y2]", 4);
    auto sl2 = builtin_algebra("sl2");
    std::vector<std::vector<Polynomial>> ef{{P("1", 3), P("0", 3), P("0", 3)}, {P("0", 3), P("1", 3), P("0", 3)}};
    auto v = evaluate_free_lie(sl2, s, ef);
    EXPECT_EQ(v[2], P("1", 3));
    EXPECT_TRUE(v[0].is_zero() && v[1].is_zero());

    auto ab = builtin_algebra("abelian3");
    std::vector<std::vector<Polynomial>> sym{coordinate_block(ab, 6, 0), coordinate_block(ab, 6, 3)};
    auto w = evaluate_free_lie(ab, freelie::parse_series("[y1,[y1,y2]] + 2 [y1,y2]", 4), sym);
    for (auto const& c : w)
        EXPECT_TRUE(c.is_zero());

    // terms above the truncation never appear
    auto t = FreeLieSeries::generator(0, 1);
    t += freelie::parse_series("[y1,y2]", 4);
    std::vector<std::vector<Polynomial>> sym2{coordinate_block(sl2, 6, 0), coordinate_block(sl2, 6, 3)};
    auto r = evaluate_free_lie(sl2, t, sym2);
    EXPECT_EQ(r[0], Polynomial::variable(6, 0));
}

TEST(EvaluateFreeLie, IsHomomorphism)
{
    std::mt19937_64 rng(44);
    auto g = builtin_algebra("gl2");
    std::vector<std::vector<Polynomial>> sym{coordinate_block(g, 8, 0), coordinate_block(g, 8, 4)};
    for (int i = 0; i < 10; ++i)
    {
        auto a = oracle::random_series(rng, 2, 5);
        auto b = oracle::random_series(rng, 2, 5);
        auto lhs = evaluate_free_lie(g, freelie::bracket(a, b), sym);
        auto ea = evaluate_free_lie(g, a, sym);
        auto eb = evaluate_free_lie(g, b, sym);
        auto rhs = lie_bracket(g, ea, eb);
        for (std::size_t k = 0; k < 4; ++k)
            EXPECT_EQ(lhs[k], rhs[k].truncated(5));
    }
}

TEST(Json, SpecExampleAndRoundTrip)
{
    std::string text = R"({ "dim": 3, "basis": ["e","f","h"], "brackets": [
        {"i":0,"j":1,"coeffs":{"2":"1"}}, {"i":2,"j":0,"coeffs":{"0":"2"}}, {"i":2,"j":1,"coeffs":{"1":"-2"}} ] })";
    auto g = parse_lie_algebra_json(text);
    auto sl2 = builtin_algebra("sl2");
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k)
                EXPECT_EQ(g.structure(i, j, k), sl2.structure(i, j, k));
    auto again = parse_lie_algebra_json(to_json(g));
    EXPECT_EQ(again.basis(), g.basis());
    EXPECT_EQ(again.structure(2, 1, 1), Rational(-2));

    auto path = std::string(::testing::TempDir()) + "kvstar_sl2.json";
    std::ofstream(path) << text;
    EXPECT_EQ(resolve_lie_algebra(path).structure(0, 1, 2), Rational(1));
    EXPECT_EQ(resolve_lie_algebra("builtin:aff1").dim(), 2u);
    EXPECT_THROW(resolve_lie_algebra("builtin:e8"), UnknownAlgebra);
}

TEST(Json, Rejections)
{
    EXPECT_THROW(parse_lie_algebra_json(R"({"dim":2,"brackets":[{"i":0,"j":1,"coeffs":{"1":"1"}},{"i":1,"j":0,"coeffs":{"1":"1"}}]})"),
                 AntisymmetryViolation);
    EXPECT_THROW(parse_lie_algebra_json(R"({"dim":2,"brackets":[{"i":0,"j":0,"coeffs":{"1":"1"}}]})"), Error);
    EXPECT_THROW(parse_lie_algebra_json(R"({"dim":2,"brackets":[{"i":0,"j":5,"coeffs":{"1":"1"}}]})"), Error);
    EXPECT_THROW(parse_lie_algebra_json("not json"), Error);
    EXPECT_THROW(parse_lie_algebra_json(R"({"dim":3,"brackets":[{"i":0,"j":1,"coeffs":{"2":"1"}},{"i":0,"j":2,"coeffs":{"2":"1"}},{"i":1,"j":2,"coeffs":{"0":"1"}}]})"),
                 JacobiViolation);
}
