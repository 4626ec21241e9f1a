#include "kvstar/freelie.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace kvstar;
using namespace kvstar::freelie;

namespace {

FreeLieSeries y1(int n = 8)
{
    return FreeLieSeries::generator(0, n);
}
FreeLieSeries y2(int n = 8)
{
    return FreeLieSeries::generator(1, n);
}
FreeLieSeries S(std::string_view text, int n = 8)
{
    return parse_series(text, n);
}

int mobius(unsigned n)
{
    int mu = 1;
    for (unsigned p = 2; p * p <= n; ++p)
        if (n % p == 0)
        {
            n /= p;
            if (n % p == 0)
                return 0;
            mu = -mu;
        }
    return n > 1 ? -mu : mu;
}

// Left-normed bracketing in the free associative algebra: w1 w2 ... wn -> [..[w1,w2],..,wn].
WordPolynomial dynkin(WordPolynomial const& p)
{
    WordPolynomial out;
    for (auto const& [w, c] : p)
    {
        WordPolynomial acc{{Word{w[0]}, Rational(1)}};
        for (std::size_t i = 1; i < w.size(); ++i)
        {
            WordPolynomial next;
            for (auto const& [u, a] : acc)
            {
                Word left = u, right{w[i]};
                left.push_back(w[i]);
                right.insert(right.end(), u.begin(), u.end());
                next[left] += a;
                next[right] -= a;
            }
            acc = std::move(next);
        }
        for (auto const& [u, a] : acc)
            out[u] += c * a;
    }
    std::erase_if(out, [](auto const& kv) { return kv.second == 0; });
    return out;
}

} // namespace

TEST(Lyndon, Examples)
{
    EXPECT_EQ(lyndon_words(2, 1).size(), 2u);
    auto d2 = lyndon_words(2, 2);
    ASSERT_EQ(d2.size(), 1u);
    EXPECT_EQ(bracket_string(d2[0]), "[y1,y2]");
    auto d3 = lyndon_words(2, 3);
    ASSERT_EQ(d3.size(), 2u);
    EXPECT_EQ(bracket_string(d3[0]), "[y1,[y1,y2]]");
    EXPECT_EQ(bracket_string(d3[1]), "[[y1,y2],y2]");
}

TEST(Lyndon, WittDimensionAndBruteForce)
{
    for (unsigned k = 1; k <= 3; ++k)
        for (unsigned n = 1; n <= 8; ++n)
        {
            if (k == 3 && n > 6)
                continue;
            long long sum = 0;
            for (unsigned d = 1; d <= n; ++d)
                if (n % d == 0)
                {
                    long long p = 1;
                    for (unsigned i = 0; i < n / d; ++i)
                        p *= k;
                    sum += mobius(d) * p;
                }
            auto words = lyndon_words(k, n);
            EXPECT_EQ(static_cast<long long>(words.size()), sum / n) << k << " " << n;
            EXPECT_EQ(witt_dimension(k, n), static_cast<std::size_t>(sum / n));
            EXPECT_EQ(words, oracle::lyndon_brute(k, n));
        }
}

TEST(Lyndon, StandardFactorization)
{
    for (unsigned n = 2; n <= 7; ++n)
        for (auto const& w : lyndon_words(2, n))
        {
            auto [u, v] = standard_factorization(w);
            EXPECT_TRUE(oracle::lyndon(u));
            EXPECT_TRUE(oracle::lyndon(v));
            Word joined = u;
            joined.insert(joined.end(), v.begin(), v.end());
            EXPECT_EQ(joined, w);
        }
}

TEST(Bracket, Examples)
{
    EXPECT_TRUE(bracket(y1(), y1()).is_zero());
    EXPECT_EQ(bracket(y2(), y1()), -bracket(y1(), y2()));
    auto z = bracket(y1(), y2());
    auto jac = bracket(y1(), bracket(y2(), z)) + bracket(y2(), bracket(z, y1())) + bracket(z, bracket(y1(), y2()));
    EXPECT_TRUE(jac.is_zero());
    EXPECT_EQ(to_string(bracket(y1(), S("[y1,y2]"))), "[y1,[y1,y2]]");
    EXPECT_EQ(to_string(bracket(S("[y1,y2]"), y2())), "[[y1,y2],y2]");
}

TEST(Bracket, AntisymmetryAndJacobiRandom)
{
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 120; ++i)
    {
        auto a = oracle::random_series(rng, 3, 7);
        auto b = oracle::random_series(rng, 3, 7);
        auto c = oracle::random_series(rng, 2, 7);
        EXPECT_EQ(bracket(a, b), -bracket(b, a));
        EXPECT_TRUE(bracket(a, a).is_zero());
        auto jac = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b));
        EXPECT_TRUE(jac.is_zero()) << to_string(jac);
    }
}

TEST(Bracket, MatchesMatrixCommutator)
{
    std::mt19937_64 rng(5);
    std::vector<oracle::QMat> gens{oracle::random_strict_upper(7, rng), oracle::random_strict_upper(7, rng)};
    for (int i = 0; i < 20; ++i)
    {
        auto a = oracle::random_series(rng, 3, 6);
        auto b = oracle::random_series(rng, 3, 6);
        auto lhs = oracle::series_matrix(bracket(a, b), gens);
        auto rhs = oracle::commutator(oracle::series_matrix(a, gens), oracle::series_matrix(b, gens));
        EXPECT_EQ(lhs, rhs);
    }
}

TEST(Truncation, MinimumOfOperands)
{
    auto a = FreeLieSeries::generator(0, 2);
    auto b = S("[y1,y2] + [y1,[y1,y2]]", 5);
    EXPECT_EQ((a + b).truncation(), 2);
    EXPECT_TRUE(bracket(a, b).is_zero());
    EXPECT_EQ((a + b).homogeneous_part(2), S("[y1,y2]", 2));
    EXPECT_TRUE((a + b).homogeneous_part(3).is_zero());
    EXPECT_EQ(bracket(y1(3), b).truncation(), 3);
}

TEST(Bch, Examples)
{
    EXPECT_EQ(log_exp_product(y1(), FreeLieSeries(8), 5), y1(5));
    EXPECT_EQ(to_string(log_exp_product(y1(), y2(), 2)), "y1 + y2 + 1/2 [y1,y2]");
    EXPECT_EQ(to_string(log_exp_product(y1(), y2(), 3)),
              "y1 + y2 + 1/2 [y1,y2] + 1/12 [y1,[y1,y2]] + 1/12 [[y1,y2],y2]");
    EXPECT_EQ(log_exp_product(y1(), y2(), 4).homogeneous_part(4), S("1/24 [y1,[[y1,y2],y2]]"));
    EXPECT_THROW(log_exp_product(y1(), y2(), 0), Error);
}

TEST(Bch, MatrixLogOracle)
{
    std::mt19937_64 rng(77);
    for (int N = 1; N <= 6; ++N)
    {
        auto z = log_exp_product(y1(N), y2(N), N);
        for (int trial = 0; trial < 3; ++trial)
        {
            // strictly upper (N+1)x(N+1): products of more than N factors vanish
            std::vector<oracle::QMat> gens{oracle::random_strict_upper(N + 1, rng),
                                           oracle::random_strict_upper(N + 1, rng)};
            auto expected = oracle::log_unipotent(
                oracle::mul(oracle::exp_nilpotent(gens[0]), oracle::exp_nilpotent(gens[1])));
            EXPECT_EQ(oracle::series_matrix(z, gens), expected) << "N = " << N;
        }
    }
}

TEST(Bch, PrimitivityViaDynkin)
{
    auto z = log_exp_product(y1(), y2(), 6);
    for (int n = 1; n <= 6; ++n)
    {
        auto p = to_associative(z.homogeneous_part(n));
        auto d = dynkin(p);
        for (auto& [w, c] : d)
            c /= n;
        EXPECT_EQ(d, p) << "degree " << n;
    }
}

TEST(Bch, AntipodeSymmetry)
{
    int N = 6;
    auto z = log_exp_product(y1(N), y2(N), N);
    auto w = log_exp_product(-y2(N), -y1(N), N);
    EXPECT_EQ(w, -z);
}

TEST(AssociativeView, RoundTripAndRejection)
{
    std::mt19937_64 rng(9);
    for (int i = 0; i < 30; ++i)
    {
        auto a = oracle::random_series(rng, 4, 6);
        EXPECT_EQ(from_associative(to_associative(a), 6), a);
    }
    WordPolynomial square{{Word{0, 0}, Rational(1)}};
    EXPECT_THROW(from_associative(square, 4), Error);
}

TEST(SeriesOfAd, Examples)
{
    EXPECT_TRUE(series_of_ad(AdSeries::one_minus_exp_neg_ad, y1(), FreeLieSeries(8), 4).is_zero());
    EXPECT_TRUE(series_of_ad(AdSeries::one_minus_exp_neg_ad, y1(), y1(), 4).is_zero());
    EXPECT_EQ(to_string(series_of_ad(AdSeries::one_minus_exp_neg_ad, y1(), y2(), 3)),
              "[y1,y2] - 1/2 [y1,[y1,y2]]");
    EXPECT_EQ(to_string(series_of_ad(AdSeries::exp_ad_minus_one, y1(), y2(), 3)),
              "[y1,y2] + 1/2 [y1,[y1,y2]]");
    EXPECT_EQ(parse_ad_series("exp_ad_minus_one"), AdSeries::exp_ad_minus_one);
    EXPECT_THROW(parse_ad_series("sinh"), Error);
}

TEST(SeriesOfAd, MatchesMatrixSeries)
{
    std::mt19937_64 rng(31);
    int N = 5;
    std::vector<oracle::QMat> gens{oracle::random_strict_upper(N + 1, rng), oracle::random_strict_upper(N + 1, rng)};
    auto x = oracle::series_matrix(y1(N), gens);
    auto t = oracle::random_series(rng, 2, N);
    auto target = oracle::series_matrix(t, gens);
    // (e^{ad x} - 1) T = e^x T e^{-x} - T
    auto ex = oracle::exp_nilpotent(x);
    auto emx = oracle::exp_nilpotent(oracle::add(oracle::zeros(N + 1), x, -1));
    auto expected = oracle::add(oracle::mul(oracle::mul(ex, target), emx), target, -1);
    EXPECT_EQ(oracle::series_matrix(series_of_ad(AdSeries::exp_ad_minus_one, y1(N), t, N), gens), expected);
}

TEST(Tangential, Examples)
{
    TangentialDerivation zero{FreeLieSeries(8), FreeLieSeries(8)};
    EXPECT_TRUE(apply_tangential(zero, S("y1 + [y1,y2]")).is_zero());
    TangentialDerivation u{y2(), FreeLieSeries(8)};
    EXPECT_EQ(to_string(apply_tangential(u, y1())), "[y1,y2]");
    EXPECT_EQ(to_string(apply_tangential(u, S("[y1,y2]"))), "[[y1,y2],y2]");
}

TEST(Tangential, LeibnizRandom)
{
    std::mt19937_64 rng(17);
    for (int i = 0; i < 40; ++i)
    {
        TangentialDerivation u{oracle::random_series(rng, 2, 7), oracle::random_series(rng, 2, 7)};
        auto a = oracle::random_series(rng, 2, 7);
        auto b = oracle::random_series(rng, 2, 7);
        auto lhs = apply_tangential(u, bracket(a, b));
        auto rhs = bracket(apply_tangential(u, a), b) + bracket(a, apply_tangential(u, b));
        EXPECT_EQ(lhs, rhs);
    }
}

TEST(DirectionalSubstitute, Examples)
{
    auto v = S("[y1,y2]");
    std::vector<FreeLieSeries> rep{v, FreeLieSeries(8)};
    EXPECT_EQ(directional_substitute(y1(), rep, 8), v);
    EXPECT_EQ(directional_substitute(S("[y1,y2]"), rep, 8), bracket(v, y2()));
    EXPECT_EQ(directional_substitute(S("[y1,[y1,y2]]"), rep, 8),
              bracket(v, S("[y1,y2]")) + bracket(y1(), bracket(v, y2())));
}

TEST(Swap, Involution)
{
    EXPECT_EQ(swap_generators(S("[y1,y2]")), S("-[y1,y2]"));
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i)
    {
        auto a = oracle::random_series(rng, 4, 6);
        EXPECT_EQ(swap_generators(swap_generators(a)), a);
    }
}

TEST(TextForm, RoundTrip)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 40; ++i)
    {
        auto a = oracle::random_series(rng, 5, 6);
        EXPECT_EQ(parse_series(to_string(a), 6), a) << to_string(a);
    }
    EXPECT_EQ(to_string(FreeLieSeries(3)), "0");
}
