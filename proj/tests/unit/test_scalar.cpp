#include <gtest/gtest.h>

#include <random>

#include "../oracles/oracles.hpp"
#include "kamforge/errors.hpp"
#include "kamforge/scalar.hpp"

using namespace kamforge;

namespace {

QuadScalar q(long a, long b, long d = 2) { return QuadScalar(Rational(a), Rational(b), d); }

}  // namespace

TEST(Quadratic, ConjugateNorm) { EXPECT_EQ(q(1, 1) * q(1, -1), q(-1, 0)); }

TEST(Quadratic, SqrtSquared) { EXPECT_EQ(q(0, 1) * q(0, 1), q(2, 0)); }

TEST(Quadratic, InverseMultipliesBack) {
  const QuadScalar x = q(1, -1);
  EXPECT_EQ(x.inverse(), q(-1, -1));
  EXPECT_EQ(x * x.inverse(), q(1, 0));
}

TEST(Quadratic, InverseOfZeroThrows) {
  try {
    (void)q(0, 0).inverse();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DivisionByZero);
  }
}

TEST(Quadratic, MixedRadicandsRejected) {
  EXPECT_THROW((void)(q(1, 1, 2) + q(1, 1, 3)), Error);
}

TEST(Quadratic, ExactSign) {
  EXPECT_EQ(exact_sign(q(3, -2)), 1);
  EXPECT_EQ(exact_sign(q(1, -1)), -1);
  EXPECT_EQ(exact_sign(q(0, 0)), 0);
}

TEST(Quadratic, SignMatchesLongDoubleOnRandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> u(-1000, 1000);
  for (int i = 0; i < 2000; ++i) {
    const long a = u(rng), b = u(rng);
    const long double v = a + b * std::sqrt(2.0L);
    const int expect = v > 0 ? 1 : (v < 0 ? -1 : 0);
    EXPECT_EQ(exact_sign(q(a, b)), expect) << a << " " << b;
  }
}

TEST(ContinuedFraction, Sqrt2) {
  const auto cf = continued_fraction(q(0, 1), 5);
  std::vector<long> got;
  for (const auto& x : cf) got.push_back(x.get_si());
  EXPECT_EQ(got, (std::vector<long>{1, 2, 2, 2, 2}));
  EXPECT_EQ(got, oracle::continued_fraction_sqrt(0, 2, 1, 5));
}

TEST(ContinuedFraction, GoldenRatio) {
  const QuadScalar phi(Rational(1, 2), Rational(1, 2), 5);
  std::vector<long> got;
  for (const auto& x : continued_fraction(phi, 5)) got.push_back(x.get_si());
  EXPECT_EQ(got, (std::vector<long>{1, 1, 1, 1, 1}));
}

TEST(ContinuedFraction, TwoPlusSqrt2) {
  std::vector<long> got;
  for (const auto& x : continued_fraction(q(2, 1), 4)) got.push_back(x.get_si());
  EXPECT_EQ(got, (std::vector<long>{3, 2, 2, 2}));
  EXPECT_EQ(got, oracle::continued_fraction_sqrt(2, 2, 1, 4));
}

TEST(ContinuedFraction, AgreesWithIntegerRecurrence) {
  for (long d : {3L, 5L, 6L, 7L, 11L, 13L, 19L, 21L}) {
    for (long P : {0L, 1L, 3L}) {
      for (long Qd : {1L, 2L, 3L}) {
        const QuadScalar x(Rational(P, Qd), Rational(1, Qd), d);
        std::vector<long> got;
        for (const auto& a : continued_fraction(x, 12)) got.push_back(a.get_si());
        EXPECT_EQ(got, oracle::continued_fraction_sqrt(P, d, Qd, 12)) << P << " " << d << " " << Qd;
      }
    }
  }
}

TEST(ContinuedFraction, RationalInputRejected) {
  try {
    (void)continued_fraction(q(3, 0), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RationalInput);
  }
}

TEST(ContinuedFraction, ConvergentsOfSqrt2) {
  const auto c = convergents(continued_fraction(q(0, 1), 5));
  ASSERT_EQ(c.size(), 5u);
  EXPECT_EQ(c[0].p, 1);
  EXPECT_EQ(c[0].q, 1);
  EXPECT_EQ(c[1].p, 3);
  EXPECT_EQ(c[1].q, 2);
  EXPECT_EQ(c[4].p, 41);
  EXPECT_EQ(c[4].q, 29);
}

TEST(Scalar, ParseLiterals) {
  const auto rat = ScalarContext::rational();
  EXPECT_EQ(Scalar::parse(rat, "3/6"), Scalar(Rational(1, 2)));
  EXPECT_EQ(Scalar::parse(rat, "0.25"), Scalar(Rational(1, 4)));
  EXPECT_EQ(Scalar::parse(rat, "1e-3"), Scalar(Rational(1, 1000)));
  const auto q2 = ScalarContext::quadratic(2);
  EXPECT_EQ(Scalar::parse(q2, "[1, -1, 2]"), Scalar::from_quadratic(q2, 1, -1));
  EXPECT_THROW((void)Scalar::parse(rat, "1/0"), Error);
  EXPECT_THROW((void)Scalar::parse(rat, "abc"), Error);
  EXPECT_THROW((void)Scalar::parse(q2, "[1, 1, 3]"), Error);
}

TEST(Scalar, LiteralRoundTrip) {
  const auto q2 = ScalarContext::quadratic(2);
  for (const Scalar& x : {Scalar::from_quadratic(q2, Rational(-7, 3), Rational(5, 11)), Scalar::from_int(q2, 4)}) {
    EXPECT_EQ(Scalar::parse(q2, x.literal()), x);
  }
  const auto f = ScalarContext::float64();
  const Scalar y(0.1);
  EXPECT_EQ(Scalar::parse(f, y.literal()), y);
}

TEST(Scalar, SquareFree) {
  EXPECT_TRUE(is_square_free(2));
  EXPECT_TRUE(is_square_free(30));
  EXPECT_FALSE(is_square_free(8));
  EXPECT_THROW((void)ScalarContext::quadratic(4), Error);
}

TEST(Certified, EnclosesExactValue) {
  const CertifiedDecimal c = certify(q(1, 1));
  EXPECT_NEAR(c.value, 1 + std::sqrt(2.0), 1e-15);
  EXPECT_LE(c.error, 1e-15);
  const CertifiedDecimal h = certified_half_power(Rational(2), 3);
  EXPECT_NEAR(h.value, 2 * std::sqrt(2.0), 1e-15);
  const CertifiedDecimal r = certified_quarter_power(Rational(16), 3);
  EXPECT_NEAR(r.value, 8.0, 1e-14);
}
