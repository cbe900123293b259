#pragma once

// Small denominators: Kolmogorov's condition, Liouville-type witnesses,
// Hadamard products of coefficient tables and the measure estimate.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kamforge/normalform.hpp"
#include "kamforge/scalar.hpp"

namespace kamforge {

struct FrequencyVector {
  std::vector<Scalar> entries;

  static FrequencyVector parse(const ScalarContext& ctx, const std::vector<std::string>& literals);
  int n() const { return static_cast<int>(entries.size()); }
  ScalarContext context() const;
  Scalar pairing(const LatticeVector& I) const;
};

struct DiophantineEstimate {
  CertifiedDecimal C_est;
  Rational nu;
  int N = 0;
  LatticeVector worst;
  /// False when n - 1 + nu is not a multiple of 1/2 and comparisons fell back to float64.
  bool exact = true;
};

/// min over 0 < |I|_inf <= N of |(omega, I)| * |I|_2^(n - 1 + nu).
DiophantineEstimate kolmogorov_constant(const FrequencyVector& omega, const Rational& nu, int N);

struct LiouvilleWitness {
  int k = 0;
  int m = 0;
  std::vector<BigInt> beta;
  Rational pairing_exact;  // |(omega_m, beta_k)| with omega_m = (1, alpha_m)
  Rational tail_bound;     // the true pairing lies in [pairing_exact, pairing_exact + tail_bound]
  BigInt norm_sq;
  CertifiedDecimal pairing_bound;
  CertifiedDecimal product;  // |(omega, beta_k)| * |beta_k|^(1 + nu)
};

LiouvilleWitness liouville_witness(int k, const Rational& nu, int m);

/// Sign of product(x) - product(y), exact when 2(1 + nu) is an integer.
int compare_products(const LiouvilleWitness& x, const LiouvilleWitness& y, const Rational& nu);

struct FourierTable {
  std::map<LatticeVector, CertifiedDecimal> coefficients;
  std::string source;
};

/// |(omega, I)|^-1 for 0 < |I|_inf <= N.
FourierTable small_denominator_series(const FrequencyVector& omega, int N);
/// Coefficient-wise product on the common support.
FourierTable hadamard_apply(const FourierTable& h, const FourierTable& f);

/// Tables over 0 < |I|_inf <= N in dimension n.
FourierTable exponential_table(int n, int N, double rate);
FourierTable polynomial_table(int n, int N, double power);
FourierTable ones_table(int n, int N);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square deviation of log|a_I|
  std::size_t points = 0;
};

/// Least squares of log|a_I| against |I|_2.
DecayFit decay_fit(const FourierTable& f);

struct MeasureParams {
  int n = 2;
  double R = 1.0;
  Rational C = Rational(1, 10);
  Rational nu = 1;
  int N = 50;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  unsigned partitions = 1;
};

struct MeasureEstimate {
  double fraction_bad = 0.0;
  double stderr_ = 0.0;
  std::uint64_t bad = 0;
  std::uint64_t samples = 0;
  unsigned partitions = 1;
  double min_abs_margin = 0.0;
  std::uint64_t exact_retests = 0;
};

/// Monte-Carlo fraction of the ball B_R violating K(C, nu) on the lattice ball of radius N.
MeasureEstimate measure_estimate(const MeasureParams& params);

}  // namespace kamforge
