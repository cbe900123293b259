#include "kamforge/scalar.hpp"

#include <cctype>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "kamforge/errors.hpp"

namespace kamforge {

namespace {

constexpr unsigned long kCertifyBits = 512;

void require_same_field(long d1, long d2) {
  if (d1 != d2) {
    fail(ErrorCode::ContextMismatch,
         "quadratic fields Q(sqrt " + std::to_string(d1) + ") and Q(sqrt " + std::to_string(d2) +
             ") do not mix");
  }
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// "n", "n/d" or a finite decimal with optional exponent.
Rational parse_rational(std::string_view raw) {
  const std::string s = trim(raw);
  if (s.empty()) fail(ErrorCode::ParseError, "empty scalar literal");
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    Rational r;
    BigInt num;
    BigInt den;
    if (num.set_str(trim(s.substr(0, slash)), 10) != 0 || den.set_str(trim(s.substr(slash + 1)), 10) != 0) {
      fail(ErrorCode::ParseError, "malformed rational literal '" + s + "'");
    }
    if (den == 0) fail(ErrorCode::DivisionByZero, "zero denominator in '" + s + "'");
    r = Rational(num, den);
    r.canonicalize();
    return r;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) fail(ErrorCode::ParseError, "malformed scalar literal '" + s + "'");
  long exponent = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') fail(ErrorCode::ParseError, "malformed scalar literal '" + s + "'");
    const std::string tail = s.substr(pos + 1);
    char* end = nullptr;
    exponent = std::strtol(tail.c_str(), &end, 10);
    if (tail.empty() || *end != '\0') fail(ErrorCode::ParseError, "malformed exponent in '" + s + "'");
  }
  BigInt num(digits, 10);
  if (negative) num = -num;
  const long shift = exponent - scale;
  BigInt pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  Rational r = shift >= 0 ? Rational(num * pow10) : Rational(num, pow10);
  r.canonicalize();
  return r;
}

BigInt isqrt(const BigInt& n) {
  BigInt r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

CertifiedDecimal certify_mpf(const mpf_class& v, const mpf_class& abs_error) {
  CertifiedDecimal out;
  out.value = v.get_d();
  mpf_class rounding(v - out.value, kCertifyBits);
  mpf_class total(abs(rounding) + abs_error, kCertifyBits);
  // get_d truncates; step one ulp outward to get an upper bound.
  out.error = std::nextafter(total.get_d(), HUGE_VAL) + DBL_TRUE_MIN;
  return out;
}

mpf_class to_mpf(const Rational& r) { return mpf_class(r, kCertifyBits); }

mpf_class relative_slack(const mpf_class& magnitude) {
  mpf_class eps(1, kCertifyBits);
  mpf_div_2exp(eps.get_mpf_t(), eps.get_mpf_t(), kCertifyBits - 64);
  return mpf_class(magnitude * eps, kCertifyBits);
}

}  // namespace

// ---------------------------------------------------------------------------
// QuadScalar

bool is_square_free(long d) {
  if (d < 2) return false;
  for (long p = 2; p * p <= d; ++p) {
    if (d % (p * p) == 0) return false;
  }
  return true;
}

QuadScalar::QuadScalar(Rational a, Rational b, long d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
  if (!is_square_free(d)) {
    fail(ErrorCode::InvalidArgument, "radicand " + std::to_string(d) + " is not a square-free integer >= 2");
  }
  a_.canonicalize();
  b_.canonicalize();
}

Rational QuadScalar::norm() const { return a_ * a_ - Rational(d_) * b_ * b_; }

QuadScalar QuadScalar::inverse() const {
  if (is_zero()) fail(ErrorCode::DivisionByZero, "inverse of zero in Q(sqrt " + std::to_string(d_) + ")");
  const Rational n = norm();
  return {a_ / n, -b_ / n, d_};
}

QuadScalar operator+(const QuadScalar& x, const QuadScalar& y) {
  require_same_field(x.d_, y.d_);
  return {x.a_ + y.a_, x.b_ + y.b_, x.d_};
}

QuadScalar operator-(const QuadScalar& x, const QuadScalar& y) {
  require_same_field(x.d_, y.d_);
  return {x.a_ - y.a_, x.b_ - y.b_, x.d_};
}

QuadScalar operator*(const QuadScalar& x, const QuadScalar& y) {
  require_same_field(x.d_, y.d_);
  return {x.a_ * y.a_ + Rational(x.d_) * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_, x.d_};
}

QuadScalar operator/(const QuadScalar& x, const QuadScalar& y) {
  require_same_field(x.d_, y.d_);
  return x * y.inverse();
}

double QuadScalar::to_double() const { return certify(*this).value; }

int exact_sign(const Rational& x) { return sgn(x); }

int exact_sign(const QuadScalar& x) {
  const int sa = sgn(x.a());
  const int sb = sgn(x.b());
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // Opposite signs: compare a^2 against d b^2.
  const int cmp_sq = sgn(x.a() * x.a() - Rational(x.d()) * x.b() * x.b());
  return sa > 0 ? cmp_sq : -cmp_sq;
}

BigInt exact_floor(const QuadScalar& x) {
  // x = (A + B sqrt d) / C with integers and C > 0; floor((A + y)/C) = floor((A + floor y)/C).
  const BigInt C = lcm(BigInt(x.a().get_den()), BigInt(x.b().get_den()));
  const BigInt A = x.a().get_num() * (C / x.a().get_den());
  const BigInt B = x.b().get_num() * (C / x.b().get_den());
  BigInt floor_y;
  if (B == 0) {
    floor_y = 0;
  } else {
    const BigInt root = isqrt(B * B * x.d());  // sqrt(B^2 d) is irrational
    floor_y = B > 0 ? root : BigInt(-root - 1);
  }
  return floor_div(A + floor_y, C);
}

std::vector<BigInt> continued_fraction(const QuadScalar& x, std::size_t k) {
  if (x.is_rational()) fail(ErrorCode::RationalInput, "continued_fraction needs an irrational input (b != 0)");
  if (exact_sign(x) <= 0) fail(ErrorCode::InvalidArgument, "continued_fraction needs x > 0");
  std::vector<BigInt> out;
  out.reserve(k);
  QuadScalar rest = x;
  for (std::size_t i = 0; i < k; ++i) {
    const BigInt a = exact_floor(rest);
    out.push_back(a);
    rest = (rest - QuadScalar(Rational(a), 0, rest.d())).inverse();
  }
  return out;
}

std::vector<Convergent> convergents(const std::vector<BigInt>& pq) {
  std::vector<Convergent> out;
  BigInt p_prev = 1, q_prev = 0, p = 0, q = 1;
  for (const BigInt& a : pq) {
    BigInt p_next = a * p_prev + p;
    BigInt q_next = a * q_prev + q;
    p = p_prev;
    q = q_prev;
    p_prev = p_next;
    q_prev = q_next;
    out.push_back({p_prev, q_prev});
  }
  return out;
}

// ---------------------------------------------------------------------------
// ScalarContext / Scalar

ScalarContext ScalarContext::quadratic(long d) {
  if (!is_square_free(d)) {
    fail(ErrorCode::InvalidArgument, "radicand " + std::to_string(d) + " is not a square-free integer >= 2");
  }
  return {ScalarKind::quadratic, d};
}

std::string ScalarContext::describe() const {
  switch (kind) {
    case ScalarKind::rational: return "rational";
    case ScalarKind::quadratic: return "quadratic(" + std::to_string(d) + ")";
    case ScalarKind::float64: return "float64";
  }
  return "?";
}

Scalar Scalar::from_int(const ScalarContext& ctx, long v) { return from_rational(ctx, Rational(v)); }

Scalar Scalar::from_rational(const ScalarContext& ctx, const Rational& r) {
  switch (ctx.kind) {
    case ScalarKind::rational: return Scalar(r);
    case ScalarKind::quadratic: return Scalar(QuadScalar(r, 0, ctx.d));
    case ScalarKind::float64: return Scalar(r.get_d());
  }
  return Scalar(r);
}

Scalar Scalar::from_quadratic(const ScalarContext& ctx, const Rational& a, const Rational& b) {
  if (ctx.kind == ScalarKind::quadratic) return Scalar(QuadScalar(a, b, ctx.d));
  if (sgn(b) != 0) {
    fail(ErrorCode::ContextMismatch, "irrational literal in a " + ctx.describe() + " context");
  }
  return from_rational(ctx, a);
}

Scalar Scalar::parse(const ScalarContext& ctx, std::string_view literal) {
  const std::string s = trim(literal);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') fail(ErrorCode::ParseError, "unterminated quadratic literal '" + s + "'");
    const std::string body = s.substr(1, s.size() - 2);
    const auto c1 = body.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : body.find(',', c1 + 1);
    if (c2 == std::string::npos) fail(ErrorCode::ParseError, "quadratic literal needs [a, b, d]: '" + s + "'");
    const Rational a = parse_rational(body.substr(0, c1));
    const Rational b = parse_rational(body.substr(c1 + 1, c2 - c1 - 1));
    const Rational d = parse_rational(body.substr(c2 + 1));
    if (d.get_den() != 1 || !d.get_num().fits_slong_p()) {
      fail(ErrorCode::ParseError, "radicand must be an integer in '" + s + "'");
    }
    const long dv = d.get_num().get_si();
    if (ctx.kind == ScalarKind::quadratic && dv != ctx.d) {
      fail(ErrorCode::ContextMismatch, "literal '" + s + "' is not in " + ctx.describe());
    }
    if (ctx.kind == ScalarKind::float64) {
      return Scalar(certify(QuadScalar(a, b, dv)).value);
    }
    return from_quadratic(ctx, a, b);
  }
  if (ctx.kind == ScalarKind::float64 && s.find('/') == std::string::npos) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v)) {
      fail(ErrorCode::ParseError, "malformed float literal '" + s + "'");
    }
    return Scalar(v);
  }
  return from_rational(ctx, parse_rational(s));
}

ScalarContext Scalar::context() const {
  if (std::holds_alternative<Rational>(value_)) return ScalarContext::rational();
  if (const auto* q = std::get_if<QuadScalar>(&value_)) return {ScalarKind::quadratic, q->d()};
  return ScalarContext::float64();
}

bool Scalar::is_zero() const {
  return std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rational>) return sgn(v) == 0;
        else if constexpr (std::is_same_v<T, QuadScalar>) return v.is_zero();
        else return v == 0.0;
      },
      value_);
}

int Scalar::sign() const {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rational>) return sgn(v);
        else if constexpr (std::is_same_v<T, QuadScalar>) return exact_sign(v);
        else return (v > 0) - (v < 0);
      },
      value_);
}

double Scalar::to_double() const {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rational>) return certify(v).value;
        else if constexpr (std::is_same_v<T, QuadScalar>) return v.to_double();
        else return v;
      },
      value_);
}

Scalar Scalar::inverse() const {
  if (is_zero()) fail(ErrorCode::DivisionByZero, "inverse of zero");
  return std::visit(
      [](const auto& v) -> Scalar {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rational>) return Scalar(Rational(1 / v));
        else if constexpr (std::is_same_v<T, QuadScalar>) return Scalar(v.inverse());
        else return Scalar(1.0 / v);
      },
      value_);
}

std::string Scalar::literal() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rational>) {
          return v.get_str();
        } else if constexpr (std::is_same_v<T, QuadScalar>) {
          return "[" + v.a().get_str() + ", " + v.b().get_str() + ", " + std::to_string(v.d()) + "]";
        } else {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.17g", v);
          return buf;
        }
      },
      value_);
}

Scalar Scalar::operator-() const {
  return std::visit([](const auto& v) { return Scalar(-v); }, value_);
}

namespace {

template <typename Op>
void combine(std::variant<Rational, QuadScalar, double>& lhs, const std::variant<Rational, QuadScalar, double>& rhs,
             Op op) {
  if (lhs.index() != rhs.index()) {
    fail(ErrorCode::ContextMismatch, "scalars from different contexts do not mix");
  }
  switch (lhs.index()) {
    case 0: op(std::get<0>(lhs), std::get<0>(rhs)); break;
    case 1: op(std::get<1>(lhs), std::get<1>(rhs)); break;
    default: op(std::get<2>(lhs), std::get<2>(rhs)); break;
  }
}

}  // namespace

Scalar& Scalar::operator+=(const Scalar& y) {
  combine(value_, y.value_, [](auto& a, const auto& b) { a = a + b; });
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& y) {
  combine(value_, y.value_, [](auto& a, const auto& b) { a = a - b; });
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& y) {
  combine(value_, y.value_, [](auto& a, const auto& b) { a = a * b; });
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& y) {
  if (y.is_zero()) fail(ErrorCode::DivisionByZero, "division by zero");
  combine(value_, y.value_, [](auto& a, const auto& b) { a = a / b; });
  return *this;
}

bool operator==(const Scalar& x, const Scalar& y) { return x.value_ == y.value_; }

std::ostream& operator<<(std::ostream& os, const Scalar& x) { return os << x.literal(); }

// ---------------------------------------------------------------------------
// Certified decimals

CertifiedDecimal certify(const Rational& x) {
  const mpf_class v = to_mpf(x);
  return certify_mpf(v, relative_slack(abs(v)));
}

CertifiedDecimal certify(const QuadScalar& x) {
  mpf_class root(x.d(), kCertifyBits);
  root = sqrt(root);
  const mpf_class a = to_mpf(x.a());
  const mpf_class b = to_mpf(x.b());
  const mpf_class v(a + b * root, kCertifyBits);
  return certify_mpf(v, relative_slack(mpf_class(abs(a) + abs(b) * root + 1, kCertifyBits)));
}

CertifiedDecimal certify(const Scalar& x) {
  if (const auto* r = x.as_rational()) return certify(*r);
  if (const auto* q = x.as_quadratic()) return certify(*q);
  return {*x.as_double(), 0.0};
}

CertifiedDecimal certified_half_power(const Rational& x, unsigned long e) {
  if (sgn(x) < 0) fail(ErrorCode::InvalidArgument, "certified_half_power needs x >= 0");
  mpf_class base = to_mpf(x);
  mpf_class v(1, kCertifyBits);
  mpf_pow_ui(v.get_mpf_t(), base.get_mpf_t(), e / 2);
  if (e % 2 == 1) v *= sqrt(base);
  return certify_mpf(v, relative_slack(mpf_class(abs(v) * (e + 4), kCertifyBits)));
}

CertifiedDecimal certified_quarter_power(const Rational& x, unsigned long e) {
  if (sgn(x) < 0) fail(ErrorCode::InvalidArgument, "certified_quarter_power needs x >= 0");
  mpf_class base = to_mpf(x);
  mpf_class root = sqrt(sqrt(base));
  mpf_class v(1, kCertifyBits);
  mpf_pow_ui(v.get_mpf_t(), root.get_mpf_t(), e);
  return certify_mpf(v, relative_slack(mpf_class(abs(v) * (e + 8), kCertifyBits)));
}

CertifiedDecimal certified_product(const CertifiedDecimal& x, const CertifiedDecimal& y) {
  CertifiedDecimal out;
  out.value = x.value * y.value;
  const double propagated =
      std::fabs(x.value) * y.error + std::fabs(y.value) * x.error + x.error * y.error;
  const double rounding = std::fabs(out.value) * DBL_EPSILON;
  out.error = std::nextafter(propagated + rounding, HUGE_VAL) * (1 + 4 * DBL_EPSILON);
  return out;
}

}  // namespace kamforge
