#include "kamforge/diophantine.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "kamforge/errors.hpp"

namespace kamforge {

namespace {

constexpr double kEps = DBL_EPSILON;

// Enumerates every nonzero I with |I|_inf <= N, in lexicographic order.
template <typename F>
void for_each_lattice(int n, int N, bool half, F&& visit) {
  LatticeVector I(n, -N);
  while (true) {
    int first = 0;
    for (int v : I) {
      if (v != 0) {
        first = v;
        break;
      }
    }
    if (first > 0 || (!half && first < 0)) visit(I);
    int pos = n - 1;
    while (pos >= 0 && I[pos] == N) I[pos--] = -N;
    if (pos < 0) break;
    ++I[pos];
  }
}

BigInt pow_big(const BigInt& base, unsigned long e) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

BigInt pow10(unsigned long e) { return pow_big(10, e); }

unsigned long factorial(int k) {
  unsigned long f = 1;
  for (int i = 2; i <= k; ++i) f *= static_cast<unsigned long>(i);
  return f;
}

Scalar power(const Scalar& x, int e) {
  Scalar r = Scalar::one(x.context());
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// m^(twice_e / 4) in double, with cheap paths for the common exponents.
double quarter_power(double m, long twice_e) {
  if (twice_e % 4 == 0) {
    double r = 1.0;
    for (long i = 0; i < twice_e / 4; ++i) r *= m;
    return r;
  }
  if (twice_e % 2 == 0) {
    double r = std::sqrt(m);
    for (long i = 0; i < (twice_e - 2) / 4; ++i) r *= m;
    return r;
  }
  return std::pow(m, static_cast<double>(twice_e) / 4.0);
}

}  // namespace

// ---------------------------------------------------------------------------

FrequencyVector FrequencyVector::parse(const ScalarContext& ctx, const std::vector<std::string>& literals) {
  FrequencyVector w;
  for (const auto& s : literals) w.entries.push_back(Scalar::parse(ctx, s));
  return w;
}

ScalarContext FrequencyVector::context() const {
  return entries.empty() ? ScalarContext::rational() : entries.front().context();
}

Scalar FrequencyVector::pairing(const LatticeVector& I) const {
  Scalar s = Scalar::zero(context());
  for (std::size_t j = 0; j < entries.size(); ++j) {
    if (I[j] != 0) s += entries[j] * Scalar::from_int(context(), I[j]);
  }
  return s;
}

// ---------------------------------------------------------------------------

DiophantineEstimate kolmogorov_constant(const FrequencyVector& omega, const Rational& nu, int N) {
  if (N < 1) fail(ErrorCode::InvalidArgument, "lattice cutoff must be >= 1");
  const int n = omega.n();
  if (n < 1) fail(ErrorCode::InvalidArgument, "empty frequency vector");
  const Rational e = Rational(n - 1) + nu;
  const Rational twice = 2 * e;
  const bool exact = omega.context().is_exact() && twice.get_den() == 1 && sgn(twice) >= 0;
  const long twice_e = exact ? twice.get_num().get_si() : 0;
  const double e_float = e.get_d();

  std::vector<double> w(n);
  std::vector<double> werr(n);
  for (int j = 0; j < n; ++j) {
    const CertifiedDecimal c = certify(omega.entries[j]);
    w[j] = c.value;
    werr[j] = c.error;
  }

  // Exact comparison key: |x|^pw * m^mw with pw = 2 or 4.
  const int pw = twice_e % 2 == 0 ? 2 : 4;
  const unsigned long mw = twice_e % 2 == 0 ? static_cast<unsigned long>(twice_e / 2) : static_cast<unsigned long>(twice_e);
  auto exact_key = [&](const LatticeVector& I) {
    long m = 0;
    for (int v : I) m += static_cast<long>(v) * v;
    return power(omega.pairing(I), pw) * Scalar::from_rational(omega.context(), Rational(pow_big(m, mw)));
  };

  LatticeVector best;
  std::optional<Scalar> best_key;
  double best_upper = HUGE_VAL;
  double best_float = HUGE_VAL;

  LatticeVector I(n, 0);
  // Iterate the leading n-1 coordinates with an odometer; the last coordinate runs in a tight loop.
  LatticeVector head(n - 1, -N);
  if (n > 1) head[0] = 0;
  while (true) {
    double xp = 0.0;
    double mp = 0.0;
    double sp = 0.0;
    double ep = 0.0;
    bool head_zero = true;
    for (int j = 0; j < n - 1; ++j) {
      xp += w[j] * head[j];
      mp += static_cast<double>(head[j]) * head[j];
      sp += std::fabs(w[j] * head[j]);
      ep += werr[j] * std::abs(head[j]);
      head_zero = head_zero && head[j] == 0;
    }
    bool head_positive = false;
    for (int j = 0; j < n - 1; ++j) {
      if (head[j] != 0) {
        head_positive = head[j] > 0;
        break;
      }
    }
    if (head_zero || head_positive) {
      const int lo = head_zero ? 1 : -N;
      for (int i = lo; i <= N; ++i) {
        const double x = xp + w[n - 1] * i;
        const double m = mp + static_cast<double>(i) * i;
        const double weight = exact ? quarter_power(m, twice_e) : std::pow(m, e_float / 2.0);
        if (!exact) {
          const double q = std::fabs(x) * weight;
          if (q < best_float) {
            best_float = q;
            std::copy(head.begin(), head.end(), I.begin());
            I[n - 1] = i;
            best = I;
          }
          continue;
        }
        const double err = ep + werr[n - 1] * std::abs(i) + (n + 2) * kEps * (sp + std::fabs(w[n - 1] * i));
        const double lower = std::max(0.0, std::fabs(x) - err) * weight * (1 - 1e-12);
        if (lower > best_upper) continue;
        std::copy(head.begin(), head.end(), I.begin());
        I[n - 1] = i;
        Scalar key = exact_key(I);
        if (!best_key || (key - *best_key).sign() < 0) {
          best_key = key;
          best = I;
          best_upper = (std::fabs(x) + err) * weight * (1 + 1e-12);
        }
      }
    }
    if (n == 1) break;
    int pos = n - 2;
    while (pos >= 0 && head[pos] == N) head[pos--] = -N;
    if (pos < 0) break;
    ++head[pos];
  }

  DiophantineEstimate est;
  est.nu = nu;
  est.N = N;
  est.worst = best;
  est.exact = exact;
  if (exact) {
    long m = 0;
    for (int v : best) m += static_cast<long>(v) * v;
    const CertifiedDecimal x = certify(omega.pairing(best).abs());
    est.C_est = certified_product(x, certified_quarter_power(Rational(m), static_cast<unsigned long>(twice_e)));
    if (x.value == 0.0 && x.error == 0.0) est.C_est = {0.0, 0.0};
  } else {
    est.C_est = {best_float, 1e-12 * best_float};
  }
  return est;
}

// ---------------------------------------------------------------------------

LiouvilleWitness liouville_witness(int k, const Rational& nu, int m) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "liouville_witness needs k >= 1");
  if (m <= k) fail(ErrorCode::InvalidArgument, "liouville_witness needs m > k");
  if (m > 8) fail(ErrorCode::InvalidArgument, "tail order m is limited to 8");
  const unsigned long kf = factorial(k);

  LiouvilleWitness w;
  w.k = k;
  w.m = m;
  BigInt first = 0;
  for (int j = 0; j <= k; ++j) first += pow10(kf - factorial(j));
  w.beta = {first, -pow10(kf)};

  Rational alpha = 0;
  for (int j = 0; j <= m; ++j) alpha += Rational(1, pow10(factorial(j)));
  const Rational pairing = Rational(w.beta[0]) + alpha * Rational(w.beta[1]);
  w.pairing_exact = abs(pairing);
  w.tail_bound = Rational(pow10(kf) * 2, pow10(factorial(m + 1)));
  w.tail_bound.canonicalize();
  w.norm_sq = w.beta[0] * w.beta[0] + w.beta[1] * w.beta[1];

  const CertifiedDecimal tail = certify(w.tail_bound);
  w.pairing_bound = certify(w.pairing_exact);
  w.pairing_bound.error = std::nextafter(w.pairing_bound.error + tail.value + tail.error, HUGE_VAL);

  const Rational twice = 2 * (1 + nu);
  CertifiedDecimal norm_pow;
  if (twice.get_den() == 1 && sgn(twice) >= 0) {
    norm_pow = certified_quarter_power(Rational(w.norm_sq), twice.get_num().get_ui());
  } else {
    const double v = std::pow(w.norm_sq.get_d(), Rational(1 + nu).get_d() / 2.0);
    norm_pow = {v, 1e-12 * v};
  }
  w.product = certified_product(w.pairing_bound, norm_pow);
  return w;
}

int compare_products(const LiouvilleWitness& x, const LiouvilleWitness& y, const Rational& nu) {
  const Rational twice = 2 * (1 + nu);
  if (twice.get_den() == 1 && sgn(twice) >= 0) {
    // product^4 = pairing^4 * norm_sq^(2(1 + nu))
    const unsigned long e = twice.get_num().get_ui();
    auto fourth = [e](const LiouvilleWitness& w) {
      Rational p2 = w.pairing_exact * w.pairing_exact;
      return Rational(p2 * p2 * Rational(pow_big(w.norm_sq, e)));
    };
    return sgn(Rational(fourth(x) - fourth(y)));
  }
  const double dx = x.product.value;
  const double dy = y.product.value;
  if (dx + x.product.error < dy - y.product.error) return -1;
  if (dx - x.product.error > dy + y.product.error) return 1;
  return 0;
}

// ---------------------------------------------------------------------------

FourierTable small_denominator_series(const FrequencyVector& omega, int N) {
  if (N < 1) fail(ErrorCode::InvalidArgument, "lattice cutoff must be >= 1");
  FourierTable t;
  t.source = "small_denominators";
  for_each_lattice(omega.n(), N, false, [&](const LatticeVector& I) {
    const Scalar x = omega.pairing(I);
    if (x.is_zero()) throw ResonantDenominator(I, 0);
    t.coefficients.emplace(I, certify(x.abs().inverse()));
  });
  return t;
}

FourierTable hadamard_apply(const FourierTable& h, const FourierTable& f) {
  FourierTable out;
  out.source = "hadamard(" + h.source + "," + f.source + ")";
  auto it = f.coefficients.begin();
  for (const auto& [I, c] : h.coefficients) {
    it = std::lower_bound(it, f.coefficients.end(), I, [](const auto& kv, const LatticeVector& key) {
      return kv.first < key;
    });
    if (it == f.coefficients.end()) break;
    if (it->first == I) out.coefficients.emplace_hint(out.coefficients.end(), I, certified_product(c, it->second));
  }
  return out;
}

namespace {

double euclid(const LatticeVector& I) {
  double s = 0.0;
  for (int v : I) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

template <typename F>
FourierTable generated_table(int n, int N, const std::string& source, F&& value) {
  if (n < 1 || N < 1) fail(ErrorCode::InvalidArgument, "table dimension and cutoff must be >= 1");
  FourierTable t;
  t.source = source;
  for_each_lattice(n, N, false, [&](const LatticeVector& I) {
    const double v = value(euclid(I));
    t.coefficients.emplace(I, CertifiedDecimal{v, 4 * kEps * std::fabs(v)});
  });
  return t;
}

}  // namespace

FourierTable exponential_table(int n, int N, double rate) {
  return generated_table(n, N, "exp", [rate](double r) { return std::exp(-rate * r); });
}

FourierTable polynomial_table(int n, int N, double power) {
  return generated_table(n, N, "poly", [power](double r) { return std::pow(r, power); });
}

FourierTable ones_table(int n, int N) {
  FourierTable t;
  t.source = "ones";
  for_each_lattice(n, N, false, [&](const LatticeVector& I) { t.coefficients.emplace(I, CertifiedDecimal{1.0, 0.0}); });
  return t;
}

DecayFit decay_fit(const FourierTable& f) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [I, c] : f.coefficients) {
    const double v = std::fabs(c.value);
    if (v == 0.0) continue;
    xs.push_back(euclid(I));
    ys.push_back(std::log(v));
  }
  DecayFit fit;
  fit.points = xs.size();
  if (xs.size() < 3) fail(ErrorCode::InsufficientSupport, "decay_fit needs at least 3 nonzero coefficients");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) fail(ErrorCode::InsufficientSupport, "decay_fit needs at least two distinct norms");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

// ---------------------------------------------------------------------------

namespace {

struct LatticeEntry {
  LatticeVector I;
  double weight;  // |I|^(n - 1 + nu)
  long norm_sq;
};

struct PartitionResult {
  std::uint64_t bad = 0;
  std::uint64_t samples = 0;
  double min_abs_margin = HUGE_VAL;
  std::uint64_t retests = 0;
};

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// |x| * m^(twice_e / 4) < C, decided in rationals.
bool exact_violation(const std::vector<double>& point, const LatticeEntry& entry, long twice_e, const Rational& C) {
  Rational x = 0;
  for (std::size_t j = 0; j < point.size(); ++j) x += Rational(point[j]) * entry.I[j];
  const int pw = twice_e % 2 == 0 ? 2 : 4;
  const unsigned long mw = twice_e % 2 == 0 ? static_cast<unsigned long>(twice_e / 2) : static_cast<unsigned long>(twice_e);
  Rational lhs = 1;
  Rational rhs = 1;
  for (int i = 0; i < pw; ++i) {
    lhs *= x;
    rhs *= C;
  }
  lhs *= Rational(pow_big(entry.norm_sq, mw));
  return lhs < rhs;
}

PartitionResult run_partition(const MeasureParams& p, const std::vector<LatticeEntry>& lattice, std::uint64_t count,
                              unsigned index, long twice_e, bool exact_capable) {
  std::seed_seq seq{static_cast<std::uint32_t>(p.seed & 0xffffffffu), static_cast<std::uint32_t>(p.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  const double C = p.C.get_d();
  PartitionResult res;
  std::vector<double> point(p.n);
  for (std::uint64_t s = 0; s < count; ++s) {
    double r2;
    do {
      r2 = 0.0;
      for (int j = 0; j < p.n; ++j) {
        point[j] = p.R * (2.0 * uniform01(rng) - 1.0);
        r2 += point[j] * point[j];
      }
    } while (r2 > p.R * p.R);
    bool bad = false;
    for (const auto& entry : lattice) {
      double x = 0.0;
      for (int j = 0; j < p.n; ++j) x += point[j] * entry.I[j];
      const double margin = std::fabs(x) * entry.weight - C;
      const double am = std::fabs(margin);
      if (am < res.min_abs_margin) res.min_abs_margin = am;
      if (am < 1e-12 && exact_capable) {
        ++res.retests;
        if (exact_violation(point, entry, twice_e, p.C)) {
          bad = true;
          break;
        }
      } else if (margin < 0) {
        bad = true;
        break;
      }
    }
    res.bad += bad ? 1 : 0;
    ++res.samples;
  }
  return res;
}

}  // namespace

MeasureEstimate measure_estimate(const MeasureParams& p) {
  if (p.samples < 1) fail(ErrorCode::InvalidArgument, "measure_estimate needs samples >= 1");
  if (sgn(p.nu) <= 0) fail(ErrorCode::InvalidArgument, "measure_estimate needs nu > 0");
  if (p.n < 1 || p.n > kMaxDim) fail(ErrorCode::InvalidArgument, "dimension out of range");
  if (p.N < 1) fail(ErrorCode::InvalidArgument, "lattice cutoff must be >= 1");
  if (!(p.R > 0)) fail(ErrorCode::InvalidArgument, "radius must be positive");
  if (sgn(p.C) < 0) fail(ErrorCode::InvalidArgument, "constant C must be nonnegative");
  const unsigned partitions = std::max(1u, p.partitions);

  const Rational twice = 2 * (Rational(p.n - 1) + p.nu);
  const bool exact_capable = twice.get_den() == 1;
  const long twice_e = exact_capable ? twice.get_num().get_si() : 0;
  const double e = Rational(Rational(p.n - 1) + p.nu).get_d();

  std::vector<LatticeEntry> lattice;
  for_each_lattice(p.n, p.N, true, [&](const LatticeVector& I) {
    long m = 0;
    for (int v : I) m += static_cast<long>(v) * v;
    const double w = exact_capable ? quarter_power(static_cast<double>(m), twice_e) : std::pow(static_cast<double>(m), e / 2.0);
    lattice.push_back({I, w, m});
  });
  std::stable_sort(lattice.begin(), lattice.end(),
                   [](const LatticeEntry& a, const LatticeEntry& b) { return a.norm_sq < b.norm_sq; });

  std::vector<PartitionResult> results(partitions);
  std::vector<std::thread> workers;
  const std::uint64_t base = p.samples / partitions;
  const std::uint64_t extra = p.samples % partitions;
  for (unsigned i = 0; i < partitions; ++i) {
    const std::uint64_t count = base + (i < extra ? 1 : 0);
    workers.emplace_back([&, i, count] { results[i] = run_partition(p, lattice, count, i, twice_e, exact_capable); });
  }
  for (auto& t : workers) t.join();

  MeasureEstimate out;
  out.partitions = partitions;
  out.min_abs_margin = HUGE_VAL;
  for (const auto& r : results) {
    out.bad += r.bad;
    out.samples += r.samples;
    out.exact_retests += r.retests;
    out.min_abs_margin = std::min(out.min_abs_margin, r.min_abs_margin);
  }
  out.fraction_bad = static_cast<double>(out.bad) / static_cast<double>(out.samples);
  out.stderr_ = std::sqrt(out.fraction_bad * (1 - out.fraction_bad) / static_cast<double>(out.samples));
  return out;
}

}  // namespace kamforge
