#pragma once

// Exact coefficient arithmetic: rationals, the real quadratic fields Q(sqrt d)
// and a float64 escape hatch for the numerical modules.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kamforge {

/// Arbitrary-precision rational. mpq_class keeps itself canonical
/// (gcd(|num|, den) = 1, den > 0) after every arithmetic operation.
using Rational = mpq_class;
using BigInt = mpz_class;

/// Exact real number a + b*sqrt(d) with d square-free and d >= 2.
class QuadScalar {
 public:
  QuadScalar(Rational a, Rational b, long d);

  const Rational& a() const noexcept { return a_; }
  const Rational& b() const noexcept { return b_; }
  long d() const noexcept { return d_; }

  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
  bool is_rational() const { return sgn(b_) == 0; }

  QuadScalar conjugate() const { return {a_, -b_, d_}; }
  /// Field norm a^2 - d b^2; nonzero for every nonzero element.
  Rational norm() const;
  QuadScalar inverse() const;

  QuadScalar operator-() const { return {-a_, -b_, d_}; }
  friend QuadScalar operator+(const QuadScalar& x, const QuadScalar& y);
  friend QuadScalar operator-(const QuadScalar& x, const QuadScalar& y);
  friend QuadScalar operator*(const QuadScalar& x, const QuadScalar& y);
  friend QuadScalar operator/(const QuadScalar& x, const QuadScalar& y);
  friend bool operator==(const QuadScalar& x, const QuadScalar& y) {
    return x.d_ == y.d_ && x.a_ == y.a_ && x.b_ == y.b_;
  }

  double to_double() const;

 private:
  Rational a_;
  Rational b_;
  long d_;
};

/// Sign of the real embedding, decided by rational comparisons of a^2 and d b^2.
int exact_sign(const QuadScalar& x);
int exact_sign(const Rational& x);

/// Exact floor of a + b sqrt(d).
BigInt exact_floor(const QuadScalar& x);

/// First k partial quotients of the regular continued fraction of x.
/// Requires x > 0 and x irrational (b != 0).
std::vector<BigInt> continued_fraction(const QuadScalar& x, std::size_t k);

/// Convergents p_i/q_i of a (finite) continued fraction.
struct Convergent {
  BigInt p;
  BigInt q;
};
std::vector<Convergent> convergents(const std::vector<BigInt>& partial_quotients);

bool is_square_free(long d);

enum class ScalarKind : std::uint8_t { rational, quadratic, float64 };

/// All scalars taking part in one computation share a context.
struct ScalarContext {
  ScalarKind kind = ScalarKind::rational;
  long d = 0;  // radicand, quadratic contexts only

  static ScalarContext rational() { return {ScalarKind::rational, 0}; }
  static ScalarContext quadratic(long d);
  static ScalarContext float64() { return {ScalarKind::float64, 0}; }

  bool is_exact() const { return kind != ScalarKind::float64; }
  std::string describe() const;
  friend bool operator==(const ScalarContext&, const ScalarContext&) = default;
};

/// Value of one of the three coefficient fields. Mixing contexts throws
/// ContextMismatch.
class Scalar {
 public:
  Scalar() : value_(Rational(0)) {}
  explicit Scalar(Rational r) : value_(std::move(r)) {}
  explicit Scalar(QuadScalar q) : value_(std::move(q)) {}
  explicit Scalar(double x) : value_(x) {}

  static Scalar zero(const ScalarContext& ctx) { return from_int(ctx, 0); }
  static Scalar one(const ScalarContext& ctx) { return from_int(ctx, 1); }
  static Scalar from_int(const ScalarContext& ctx, long v);
  static Scalar from_rational(const ScalarContext& ctx, const Rational& r);
  /// a + b sqrt(d) in a quadratic context; only b = 0 is accepted elsewhere.
  static Scalar from_quadratic(const ScalarContext& ctx, const Rational& a, const Rational& b);

  /// Parses "num/den", integers, finite decimals ("0.25") and "[a, b, d]".
  static Scalar parse(const ScalarContext& ctx, std::string_view literal);

  ScalarContext context() const;

  bool is_zero() const;
  int sign() const;
  double to_double() const;
  Scalar abs() const { return sign() < 0 ? -*this : *this; }
  Scalar inverse() const;

  /// "num/den" for rationals, "[a, b, d]" for quadratic values, %.17g for floats.
  std::string literal() const;

  const Rational* as_rational() const { return std::get_if<Rational>(&value_); }
  const QuadScalar* as_quadratic() const { return std::get_if<QuadScalar>(&value_); }
  const double* as_double() const { return std::get_if<double>(&value_); }

  Scalar operator-() const;
  Scalar& operator+=(const Scalar& y);
  Scalar& operator-=(const Scalar& y);
  Scalar& operator*=(const Scalar& y);
  Scalar& operator/=(const Scalar& y);
  friend Scalar operator+(Scalar x, const Scalar& y) { return x += y; }
  friend Scalar operator-(Scalar x, const Scalar& y) { return x -= y; }
  friend Scalar operator*(Scalar x, const Scalar& y) { return x *= y; }
  friend Scalar operator/(Scalar x, const Scalar& y) { return x /= y; }
  friend bool operator==(const Scalar& x, const Scalar& y);

 private:
  std::variant<Rational, QuadScalar, double> value_;
};

std::ostream& operator<<(std::ostream& os, const Scalar& x);

/// A float64 value together with a rigorous bound on its distance to the exact
/// quantity it approximates.
struct CertifiedDecimal {
  double value = 0.0;
  double error = 0.0;
};

CertifiedDecimal certify(const Rational& x);
CertifiedDecimal certify(const QuadScalar& x);
CertifiedDecimal certify(const Scalar& x);
/// Certified x^(e/2) for a nonnegative rational x and nonnegative integer e.
CertifiedDecimal certified_half_power(const Rational& x, unsigned long e);
/// Certified x^(e/4).
CertifiedDecimal certified_quarter_power(const Rational& x, unsigned long e);
/// Certified product, with first-order error propagation rounded outward.
CertifiedDecimal certified_product(const CertifiedDecimal& x, const CertifiedDecimal& y);

}  // namespace kamforge
