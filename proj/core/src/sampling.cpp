#include "kamforge/sampling.hpp"

#include <algorithm>

namespace kamforge {

namespace {

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Rational random_rational(std::mt19937_64& rng, int range) {
  int num = 0;
  while (num == 0) num = uniform_int(rng, -range, range);
  Rational r(num, uniform_int(rng, 1, range));
  r.canonicalize();
  return r;
}

}  // namespace

Scalar random_scalar(const ScalarContext& ctx, std::mt19937_64& rng, int range) {
  switch (ctx.kind) {
    case ScalarKind::rational: return Scalar(random_rational(rng, range));
    case ScalarKind::quadratic: {
      const Rational a = random_rational(rng, range);
      const Rational b = uniform_int(rng, 0, 1) ? random_rational(rng, range) : Rational(0);
      return Scalar::from_quadratic(ctx, a, b);
    }
    case ScalarKind::float64: break;
  }
  return Scalar(std::uniform_real_distribution<double>(-range, range)(rng));
}

PoissonSeries random_series(const ScalarContext& ctx, const TruncationSpec& trunc, BracketMode mode,
                            const SeriesShape& shape, std::mt19937_64& rng) {
  PoissonSeries out(ctx, trunc, mode);
  const int terms = uniform_int(rng, 1, std::max(1, shape.max_terms));
  const int q_lo = mode == BracketMode::symplectic ? 0 : -shape.max_q;
  for (int t = 0; t < terms; ++t) {
    TermKey key;
    for (int j = 0; j < trunc.n; ++j) key.I[j] = uniform_int(rng, q_lo, shape.max_q);
    int budget = uniform_int(rng, 0, shape.max_p_degree);
    for (int r = 0; r < budget; ++r) key.J[uniform_int(rng, 0, trunc.n - 1)] += 1;
    key.k = uniform_int(rng, shape.min_t, shape.max_t);
    out.add_term(key, random_scalar(ctx, rng, shape.coef_range));
  }
  return out;
}

LatticeVector random_lattice(int n, int N, std::mt19937_64& rng) {
  LatticeVector I(n, 0);
  while (std::all_of(I.begin(), I.end(), [](int v) { return v == 0; })) {
    for (auto& v : I) v = uniform_int(rng, -N, N);
  }
  return I;
}

}  // namespace kamforge
