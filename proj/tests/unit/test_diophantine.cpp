#include <gtest/gtest.h>

#include "../oracles/oracles.hpp"
#include "helpers.hpp"
#include "kamforge/diophantine.hpp"
#include "kamforge/errors.hpp"

using namespace kamforge;
using namespace kamforge::testing_support;

namespace {

FrequencyVector sqrt2_omega() { return FrequencyVector::parse(ScalarContext::quadratic(2), {"1", "[0, 1, 2]"}); }

bool is_convergent_pair(const LatticeVector& v) {
  const auto cf = convergents(continued_fraction(QuadScalar(0, 1, 2), 30));
  const long p = std::labs(v[0]), q = std::labs(v[1]);
  if ((v[0] > 0) == (v[1] > 0)) return false;
  for (const auto& c : cf)
    if (c.p == p && c.q == q) return true;
  return false;
}

}  // namespace

TEST(KolmogorovConstant, ResonantIsZero) {
  const auto omega = FrequencyVector::parse(ScalarContext::rational(), {"1", "1"});
  const auto e = kolmogorov_constant(omega, 1, 2);
  EXPECT_EQ(e.C_est.value, 0.0);
  EXPECT_EQ(e.worst, (LatticeVector{1, -1}));
}

TEST(KolmogorovConstant, Sqrt2MonotoneAndMatchesBruteForce) {
  double prev = INFINITY;
  for (int N : {10, 30, 100, 300}) {
    const auto e = kolmogorov_constant(sqrt2_omega(), 1, N);
    EXPECT_TRUE(e.exact);
    EXPECT_GT(e.C_est.value, 0.0);
    EXPECT_LE(e.C_est.value, prev);
    prev = e.C_est.value;
    const long double brute = oracle::kolmogorov_brute(1.0L, std::sqrt(2.0L), 1.0L, N);
    EXPECT_NEAR(e.C_est.value, static_cast<double>(brute), 1e-12);
    EXPECT_LE(e.C_est.error, 1e-12);
  }
}

TEST(KolmogorovConstant, WorstVectorsAreConvergents) {
  for (const Rational nu : {Rational(1), Rational(1, 2), Rational(1, 4)}) {
    for (int N : {10, 100}) {
      const auto e = kolmogorov_constant(sqrt2_omega(), nu, N);
      EXPECT_TRUE(is_convergent_pair(e.worst)) << nu.get_str() << " " << N << " " << e.worst[0] << "," << e.worst[1];
      int bi = 0, bj = 0;
      (void)oracle::kolmogorov_brute(1.0L, std::sqrt(2.0L), nu.get_d(), N, &bi, &bj);
      EXPECT_EQ(std::labs(e.worst[0]), std::labs(bi));
      EXPECT_EQ(std::labs(e.worst[1]), std::labs(bj));
    }
  }
}

TEST(KolmogorovConstant, NonHalfIntegerExponentFallsBack) {
  const auto e = kolmogorov_constant(sqrt2_omega(), Rational(1, 3), 20);
  EXPECT_FALSE(e.exact);
}

TEST(Liouville, FirstWitness) {
  const auto w = liouville_witness(1, 1, 4);
  EXPECT_EQ(w.pairing_exact, Rational(10001, 100000) + Rational(1) / Rational(BigInt("100000000000000000000000")));
  EXPECT_GE(w.pairing_exact, Rational(10001, 100000));
  EXPECT_LE(w.pairing_exact + w.tail_bound, Rational(10002, 100000));
  EXPECT_LT(w.tail_bound, Rational(1, 1000000));
  // the j = 0 and j = 1 terms of the sum coincide
  EXPECT_EQ(w.beta, (std::vector<BigInt>{2, -10}));
}

TEST(Liouville, SecondWitnessLeadingOrder) {
  const auto w = liouville_witness(2, 1, 4);
  EXPECT_NEAR(w.pairing_bound.value, 1e-4, 1e-8);
}

TEST(Liouville, ProductsDecrease) {
  const auto w1 = liouville_witness(1, 1, 4);
  const auto w2 = liouville_witness(2, 1, 4);
  const auto w3 = liouville_witness(3, 1, 4);
  EXPECT_LT(compare_products(w2, w1, 1), 0);
  EXPECT_LT(compare_products(w3, w2, 1), 0);
  EXPECT_GT(compare_products(w1, w3, 1), 0);
  EXPECT_EQ(compare_products(w2, w2, 1), 0);
  EXPECT_LT(w2.product.value, w1.product.value);
}

TEST(Liouville, ArgumentChecks) {
  EXPECT_THROW((void)liouville_witness(0, 1, 4), Error);
  EXPECT_THROW((void)liouville_witness(4, 1, 4), Error);
}

TEST(SmallDenominators, Entries) {
  const auto h = small_denominator_series(sqrt2_omega(), 3);
  const auto at = [&](LatticeVector I) { return h.coefficients.at(I).value; };
  EXPECT_NEAR(at({1, -1}), 1 + std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(at({0, 1}), 1 / std::sqrt(2.0), 1e-15);
}

TEST(SmallDenominators, ResonanceRejected) {
  const auto omega = FrequencyVector::parse(ScalarContext::rational(), {"1", "2"});
  EXPECT_THROW((void)small_denominator_series(omega, 3), ResonantDenominator);
}

TEST(Hadamard, CommonSupport) {
  FourierTable a, b;
  a.coefficients[{1}] = {2, 0};
  a.coefficients[{2}] = {3, 0};
  b.coefficients[{1}] = {5, 0};
  b.coefficients[{3}] = {7, 0};
  const auto c = hadamard_apply(a, b);
  ASSERT_EQ(c.coefficients.size(), 1u);
  EXPECT_EQ(c.coefficients.at({1}).value, 10.0);
}

TEST(Hadamard, OnesIsIdentity) {
  const auto f = exponential_table(2, 6, 1.5);
  const auto g = hadamard_apply(ones_table(2, 6), f);
  ASSERT_EQ(g.coefficients.size(), f.coefficients.size());
  for (const auto& [I, c] : f.coefficients) EXPECT_EQ(g.coefficients.at(I).value, c.value);
}

TEST(Hadamard, ProductWithExponentialStillDecays) {
  const auto h = small_denominator_series(sqrt2_omega(), 15);
  const auto fit = decay_fit(hadamard_apply(h, exponential_table(2, 15, 2.0)));
  EXPECT_LT(fit.slope, 0.0);
}

TEST(DecayFit, ExactExponentials) {
  EXPECT_NEAR(decay_fit(exponential_table(2, 20, 2.0)).slope, -2.0, 1e-6);
  EXPECT_NEAR(decay_fit(exponential_table(2, 20, -1.0)).slope, 1.0, 1e-6);
  EXPECT_LT(decay_fit(exponential_table(2, 20, 2.0)).residual, 1e-9);
}

TEST(DecayFit, PolynomialSlopeShrinks) {
  const auto s10 = decay_fit(polynomial_table(2, 10, 3.0));
  const auto s40 = decay_fit(polynomial_table(2, 40, 3.0));
  EXPECT_GT(s10.slope, 0.0);
  EXPECT_LT(s40.slope, s10.slope);
  EXPECT_GT(s40.residual, 1e-3);
}

TEST(DecayFit, TooFewPoints) {
  FourierTable t;
  t.coefficients[{1}] = {1, 0};
  EXPECT_THROW((void)decay_fit(t), Error);
}

TEST(Measure, Extremes) {
  MeasureParams p;
  p.samples = 2000;
  p.C = 0;
  EXPECT_EQ(measure_estimate(p).fraction_bad, 0.0);
  p.C = 1000;
  EXPECT_EQ(measure_estimate(p).fraction_bad, 1.0);
}

TEST(Measure, DeterministicPerSeedAndPartitions) {
  MeasureParams p;
  p.samples = 5000;
  p.seed = 7;
  p.partitions = 3;
  const auto a = measure_estimate(p);
  const auto b = measure_estimate(p);
  EXPECT_EQ(a.bad, b.bad);
  EXPECT_EQ(a.partitions, 3u);
  EXPECT_EQ(a.samples, 5000u);
}

TEST(Measure, MonotoneInC) {
  MeasureParams p;
  p.samples = 20000;
  p.seed = 1;
  std::uint64_t prev = 0;
  for (const Rational c : {Rational(1, 80), Rational(1, 40), Rational(1, 20), Rational(1, 10)}) {
    p.C = c;
    const auto m = measure_estimate(p);
    EXPECT_GE(m.bad, prev);
    prev = m.bad;
  }
}
