#include "kvstar/polynomial.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace kvstar;

TEST(Rational, ParseAndPrint)
{
    EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
    EXPECT_EQ(parse_rational("-2"), Rational(-2));
    EXPECT_EQ(to_string(Rational(-1, 6)), "-1/6");
    EXPECT_THROW(parse_rational("1/0"), ParseError);
    EXPECT_THROW(parse_rational("abc"), ParseError);
}

TEST(Rational, Bernoulli)
{
    EXPECT_EQ(bernoulli(0), Rational(1));
    EXPECT_EQ(bernoulli(1), Rational(-1, 2));
    EXPECT_EQ(bernoulli(2), Rational(1, 6));
    EXPECT_EQ(bernoulli(3), Rational(0));
    EXPECT_EQ(bernoulli(4), Rational(-1, 30));
    EXPECT_EQ(bernoulli(12), Rational(-691, 2730));
}

TEST(Polynomial, ParseGrammar)
{
    auto p = parse_polynomial("x0*x1 + 1/2 x2 - 1/6", 3);
    EXPECT_EQ(to_string(p), "x0*x1 + 1/2 x2 - 1/6");
    EXPECT_EQ(parse_polynomial("(x0 + x1)^2", 2), parse_polynomial("x0^2 + 2 x0 x1 + x1^2", 2));
    EXPECT_EQ(parse_polynomial("-x0", 1), -Polynomial::variable(1, 0));
    EXPECT_TRUE(parse_polynomial("x0 - x0", 1).is_zero());
    EXPECT_THROW(parse_polynomial("x3", 3), ParseError);
    EXPECT_THROW(parse_polynomial("x0 +", 3), ParseError);
    EXPECT_THROW(parse_polynomial("(x0", 3), ParseError);
}

TEST(Polynomial, PrintOrder)
{
    auto p = parse_polynomial("1 + x1 + x0 + x0^2 + x0*x1 + x1^2", 2);
    EXPECT_EQ(to_string(p), "x0^2 + x0*x1 + x1^2 + x0 + x1 + 1");
    EXPECT_EQ(to_string(Polynomial(2)), "0");
}

TEST(Polynomial, RoundTripRandom)
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i)
    {
        auto p = oracle::random_polynomial(rng, 3, 4, 6);
        EXPECT_EQ(parse_polynomial(to_string(p), 3), p);
    }
}

TEST(Polynomial, RingLaws)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 30; ++i)
    {
        auto a = oracle::random_polynomial(rng, 3, 3, 4);
        auto b = oracle::random_polynomial(rng, 3, 3, 4);
        auto c = oracle::random_polynomial(rng, 3, 3, 4);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_TRUE((a - a).is_zero());
    }
}

TEST(Polynomial, DerivativeAndSubstitute)
{
    auto p = parse_polynomial("x0^3*x1 + 2 x1^2", 2);
    EXPECT_EQ(p.derivative(0), parse_polynomial("3 x0^2*x1", 2));
    EXPECT_EQ(p.derivative(Exponent{2, 1}), parse_polynomial("6 x0", 2));
    std::vector<Polynomial> images{parse_polynomial("x0 + x1", 2), parse_polynomial("x1", 2)};
    EXPECT_EQ(parse_polynomial("x0^2", 2).substitute(images), parse_polynomial("(x0 + x1)^2", 2));
    EXPECT_DOUBLE_EQ(p.evaluate(std::vector<double>{2.0, 3.0}), 8 * 3 + 18);
}

TEST(Polynomial, Truncation)
{
    auto p = parse_polynomial("x0^3 + x0*x1 + x1 + 1", 2);
    EXPECT_EQ(p.truncated(2), parse_polynomial("x0*x1 + x1 + 1", 2));
    EXPECT_EQ(p.homogeneous_part(1), parse_polynomial("x1", 2));
    EXPECT_EQ(p.truncated(DegreeCap{1, 1, 0}), parse_polynomial("x0^3 + 1", 2));
}

TEST(Polynomial, ExpSeries)
{
    auto x = Polynomial::variable(1, 0);
    auto e = exp_series(x, DegreeCap{0, 1, 4});
    EXPECT_EQ(e, parse_polynomial("1 + x0 + 1/2 x0^2 + 1/6 x0^3 + 1/24 x0^4", 1));
}

TEST(Polynomial, ExponentsUpTo)
{
    auto e = exponents_up_to(3, 2);
    EXPECT_EQ(e.size(), 10u);
    EXPECT_EQ(e.front(), (Exponent{0, 0, 0}));
    std::set<Exponent> unique(e.begin(), e.end());
    EXPECT_EQ(unique.size(), e.size());
}
