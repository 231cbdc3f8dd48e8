#include <random>

#include <gtest/gtest.h>

#include "qcong/laurent_poly.hpp"

using namespace qcong;

namespace {

LaurentPoly poly(std::initializer_list<std::pair<std::int64_t, int>> terms)
{
    std::vector<Term> t;
    for (auto [e, c] : terms) t.push_back({e, Rational{c}});
    return LaurentPoly::from_terms(std::move(t));
}

const LaurentPoly q = LaurentPoly::q_power(1);
const LaurentPoly one{1};

LaurentPoly random_poly(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> len(0, 6), exp(-5, 8), num(-9, 9), den(1, 5);
    std::vector<Term> t;
    for (int i = len(rng); i > 0; --i) t.push_back({exp(rng), make_rational(num(rng), den(rng))});
    return LaurentPoly::from_terms(std::move(t));
}

} // namespace

TEST(Rational, CanonicalForm)
{
    const Rational r = make_rational(6, -4);
    EXPECT_EQ(r.get_num(), -3);
    EXPECT_EQ(r.get_den(), 2);
    EXPECT_EQ(make_rational(0, 7).get_den(), 1);
    EXPECT_EQ(parse_rational("-10/4"), Rational(-5, 2));
    EXPECT_THROW(parse_rational("1/0"), DivByZero);
    EXPECT_THROW(parse_rational("x"), ConfigError);
    EXPECT_EQ(pow(Rational{2, 3}, -2), Rational(9, 4));
}

TEST(PolyMul, Examples)
{
    EXPECT_EQ((one + q) * (one - q), one - q * q);
    EXPECT_TRUE((LaurentPoly{} * (one + q)).is_zero());
    EXPECT_EQ((LaurentPoly::q_power(-1) + one) * q, one + q);
}

TEST(PolyMul, SparseLargeSpan)
{
    const LaurentPoly a = one + LaurentPoly::q_power(100000);
    const LaurentPoly b = one - LaurentPoly::q_power(100000);
    EXPECT_EQ(a * b, one - LaurentPoly::q_power(200000));
}

TEST(PolyDivexact, Examples)
{
    EXPECT_EQ(poly_divexact(one - q * q, one - q), one + q);
    EXPECT_EQ(poly_divexact(poly({{3, 1}, {0, -1}}), q - one), poly({{2, 1}, {1, 1}, {0, 1}}));
    EXPECT_THROW(poly_divexact(one - q * q, one - q * q * q), NotDivisible);
    EXPECT_THROW(poly_divexact(one, LaurentPoly{}), DivByZero);
}

TEST(PolyDivexact, LaurentUnits)
{
    // q^-3 (1 - q^4) / (q^2 (1 - q)) = q^-5 (1 + q + q^2 + q^3)
    const LaurentPoly n = poly({{-3, 1}, {1, -1}});
    const LaurentPoly d = poly({{2, 1}, {3, -1}});
    EXPECT_EQ(poly_divexact(n, d), poly({{-5, 1}, {-4, 1}, {-3, 1}, {-2, 1}}));
    EXPECT_EQ(poly_divexact(LaurentPoly{}, d), LaurentPoly{});
}

TEST(PolySubstitute, Examples)
{
    EXPECT_EQ(poly_substitute(one + q, Substitution::power(2)), one + q * q);
    EXPECT_EQ(poly_substitute(poly({{2, 1}, {1, 1}, {0, 1}}), Substitution::negate()), poly({{2, 1}, {1, -1}, {0, 1}}));
    EXPECT_EQ(poly_substitute(one + q, Substitution::reciprocal()), LaurentPoly::q_power(-1) + one);
    EXPECT_THROW(Substitution::power(0), OutOfRange);
}

TEST(PolyEval, Examples)
{
    const LaurentPoly three = poly({{2, 1}, {1, 1}, {0, 1}});
    EXPECT_EQ(poly_eval(three, 1), 3);
    EXPECT_EQ(poly_eval(three, -1), 1);
    EXPECT_THROW(poly_eval(LaurentPoly::q_power(-1) + one, 0), ZeroAtPole);
    EXPECT_EQ(poly_eval(LaurentPoly::q_power(-2), Rational{1, 3}), 9);
}

TEST(LaurentPoly, CanonicalStorage)
{
    const LaurentPoly p = poly({{1, 2}, {1, -2}, {0, 1}});
    EXPECT_EQ(p.size(), 1u);
    EXPECT_EQ(p, one);
    EXPECT_THROW(LaurentPoly{}.min_exp(), OutOfRange);
    EXPECT_EQ((q - q).size(), 0u);
    EXPECT_EQ(poly({{2, 1}, {1, -1}, {0, 1}}).to_string(), "q^2 - q + 1");
}

TEST(LaurentPoly, DenseMulBinomialMatchesSparse)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const LaurentPoly p = random_poly(rng);
        if (p.is_zero()) continue;
        for (std::int64_t e : {-3, -1, 1, 4}) {
            detail::DensePoly d(p);
            d.mul_binomial(Rational{2, 3}, e);
            d.trim();
            LaurentPoly sparse = p;
            sparse.mul_binomial(Rational{2, 3}, e);
            EXPECT_EQ(std::move(d).to_poly(), sparse);
        }
    }
}

TEST(PolyringProperty, RingAxioms)
{
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 200; ++trial) {
        const LaurentPoly a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_EQ(a + (b - a), b);
        EXPECT_EQ(a * one, a);
    }
}

TEST(PolyringProperty, DivexactRoundTrip)
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const LaurentPoly p = random_poly(rng), d = random_poly(rng);
        if (d.is_zero()) continue;
        const LaurentPoly pd = p * d;
        EXPECT_EQ(poly_divexact(pd, d) * d, pd);
        EXPECT_EQ(poly_divexact(pd, d), p);
    }
}

TEST(PolyringProperty, SubstitutionInvolutions)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const LaurentPoly p = random_poly(rng);
        EXPECT_EQ(poly_substitute(poly_substitute(p, Substitution::reciprocal()), Substitution::reciprocal()), p);
        EXPECT_EQ(poly_substitute(poly_substitute(p, Substitution::negate()), Substitution::negate()), p);
    }
}

TEST(PolyringProperty, EvalIsHomomorphism)
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> num(-7, 7), den(1, 6);
    for (int trial = 0; trial < 200; ++trial) {
        const LaurentPoly a = random_poly(rng), b = random_poly(rng);
        Rational x = make_rational(num(rng), den(rng));
        if (x == 0) x = 1;
        EXPECT_EQ(poly_eval(a * b, x), poly_eval(a, x) * poly_eval(b, x));
        EXPECT_EQ(poly_eval(a + b, x), poly_eval(a, x) + poly_eval(b, x));
    }
}
