#include "kamforge/normalform.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "kamforge/errors.hpp"

namespace kamforge {

namespace {

using PolyP = std::map<Exponents, Scalar>;

int degree(const Exponents& J) {
  int s = 0;
  for (auto j : J) s += j;
  return s;
}

LatticeVector to_lattice(const Exponents& I, int n) { return LatticeVector(I.begin(), I.begin() + n); }

bool abs_less(const Scalar& x, const Scalar& y) { return (x.abs() - y.abs()).sign() < 0; }

void note_denominator(std::optional<DenominatorRecord>& best, const Scalar& value, const LatticeVector& v) {
  if (!best || abs_less(value, best->value)) best = DenominatorRecord{value.abs(), v};
}

void merge_denominator(std::optional<DenominatorRecord>& best, const std::optional<DenominatorRecord>& other) {
  if (other) note_denominator(best, other->value, other->vector);
}

TermKey key_of(const Exponents& I, const Exponents& J, int k) {
  TermKey key;
  key.I = I;
  key.J = J;
  key.k = k;
  return key;
}

Exponents unit(int j) {
  Exponents e{};
  e[j] = 1;
  return e;
}

}  // namespace

// ---------------------------------------------------------------------------

IntegrableHamiltonian IntegrableHamiltonian::from_series(const PoissonSeries& h) {
  if (h.mode() != BracketMode::torus) {
    fail(ErrorCode::InvalidArgument, "an integrable Hamiltonian lives in the torus algebra");
  }
  const int n = h.n();
  IntegrableHamiltonian H{h, {}, {}};
  H.omega.assign(n, Scalar::zero(h.context()));
  H.alpha.assign(n, std::vector<Scalar>(n, Scalar::zero(h.context())));
  const Scalar half = Scalar::from_rational(h.context(), Rational(1, 2));
  for (const auto& [key, c] : h.terms()) {
    if (!key.q_free() || key.k != 0) {
      fail(ErrorCode::InvalidArgument, "integrable Hamiltonian must depend on p only");
    }
    const int deg = key.p_degree();
    if (deg == 0) fail(ErrorCode::InvalidArgument, "integrable Hamiltonian must have no constant term");
    if (deg == 1) {
      for (int j = 0; j < n; ++j) {
        if (key.J[j] == 1) H.omega[j] = c;
      }
    } else if (deg == 2) {
      std::vector<int> idx;
      for (int j = 0; j < n; ++j) {
        for (int r = 0; r < key.J[j]; ++r) idx.push_back(j);
      }
      if (idx[0] == idx[1]) {
        H.alpha[idx[0]][idx[0]] = c;
      } else {
        H.alpha[idx[0]][idx[1]] = c * half;
        H.alpha[idx[1]][idx[0]] = c * half;
      }
    }
  }
  return H;
}

Scalar IntegrableHamiltonian::pairing(const Exponents& I) const {
  Scalar s = Scalar::zero(series.context());
  for (int j = 0; j < n(); ++j) {
    if (I[j] != 0) s += omega[j] * Scalar::from_int(series.context(), I[j]);
  }
  return s;
}

std::vector<LatticeVector> resonances(const std::vector<Scalar>& omega, int N) {
  if (N < 1) fail(ErrorCode::InvalidArgument, "lattice cutoff must be >= 1");
  if (omega.empty()) return {};
  const int n = static_cast<int>(omega.size());
  const ScalarContext ctx = omega.front().context();
  std::vector<LatticeVector> out;
  LatticeVector I(n, -N);
  while (true) {
    int first = 0;
    for (int v : I) {
      if (v != 0) {
        first = v;
        break;
      }
    }
    if (first > 0) {
      Scalar s = Scalar::zero(ctx);
      for (int j = 0; j < n; ++j) {
        if (I[j] != 0) s += omega[j] * Scalar::from_int(ctx, I[j]);
      }
      if (s.is_zero()) out.push_back(I);
    }
    int pos = n - 1;
    while (pos >= 0 && I[pos] == N) I[pos--] = -N;
    if (pos < 0) break;
    ++I[pos];
  }
  return out;
}

// ---------------------------------------------------------------------------

HomologicalSolution homological_solve(const IntegrableHamiltonian& H, const PoissonSeries& R, int p_cap) {
  H.series.require_compatible(R);
  const int n = H.n();
  const ScalarContext ctx = R.context();
  const int cap = std::min(p_cap, R.trunc().Dp);

  // dH[j] = partial derivative of H in p_j.
  std::vector<PolyP> dH(n);
  for (const auto& [key, c] : H.series.terms()) {
    for (int j = 0; j < n; ++j) {
      if (key.J[j] == 0) continue;
      Exponents J = key.J;
      J[j] -= 1;
      dH[j].try_emplace(J, Scalar::zero(ctx)).first->second += c * Scalar::from_int(ctx, key.J[j]);
    }
  }

  // Group the eliminable part of R by (I, k).
  std::map<std::pair<Exponents, int>, PolyP> groups;
  for (const auto& [key, c] : R.terms()) {
    if (key.q_free() || key.p_degree() > cap) continue;
    groups[{key.I, key.k}][key.J] = c;
  }

  HomologicalSolution out{PoissonSeries::empty_like(R), PoissonSeries::empty_like(R), 0, std::nullopt};
  for (const auto& [group, r] : groups) {
    const auto& [I, k] = group;
    const Scalar omega_I = H.pairing(I);
    if (omega_I.is_zero()) throw ResonantDenominator(to_lattice(I, n), k);
    note_denominator(out.smallest, omega_I, to_lattice(I, n));

    // lambda_I(p) = sum_j I_j dH/dp_j; its constant part is (omega, I).
    PolyP lambda;
    for (int j = 0; j < n; ++j) {
      if (I[j] == 0) continue;
      for (const auto& [J, c] : dH[j]) {
        if (degree(J) == 0 || degree(J) > cap) continue;
        auto& slot = lambda.try_emplace(J, Scalar::zero(ctx)).first->second;
        slot += c * Scalar::from_int(ctx, I[j]);
      }
    }
    std::erase_if(lambda, [](const auto& kv) { return kv.second.is_zero(); });

    PolyP s;
    for (int m = 0; m <= cap; ++m) {
      std::set<Exponents> targets;
      for (const auto& [J, c] : r) {
        if (degree(J) == m) targets.insert(J);
      }
      for (const auto& [Js, c] : s) {
        for (const auto& [L, lc] : lambda) {
          if (degree(Js) + degree(L) != m) continue;
          Exponents J{};
          for (int j = 0; j < n; ++j) J[j] = Js[j] + L[j];
          targets.insert(J);
        }
      }
      for (const Exponents& J : targets) {
        Scalar acc = Scalar::zero(ctx);
        if (auto it = r.find(J); it != r.end()) acc -= it->second;
        for (const auto& [L, lc] : lambda) {
          Exponents rest{};
          bool fits = true;
          for (int j = 0; j < n && fits; ++j) {
            rest[j] = J[j] - L[j];
            fits = rest[j] >= 0;
          }
          if (!fits) continue;
          if (auto it = s.find(rest); it != s.end()) acc -= lc * it->second;
        }
        if (!acc.is_zero()) s[J] = acc / omega_I;
      }
    }
    for (const auto& [J, c] : s) {
      const TermKey key = key_of(I, J, k);
      if (!R.trunc().admits(key)) {
        fail(ErrorCode::TruncationExceeded, "generator term outside the truncation window");
      }
      out.S.add_term(key, c);
      ++out.eliminated;
    }
  }
  out.residual = R + poisson_bracket(H.series, out.S);
  return out;
}

// ---------------------------------------------------------------------------

PoissonSeries perturbed_hamiltonian(const IntegrableHamiltonian& H, const PoissonSeries& Q) {
  H.series.require_compatible(Q);
  PoissonSeries F = H.series;
  const auto& tr = Q.trunc();
  for (const auto& [key, c] : Q.terms()) {
    if (key.p_degree() > tr.Dp || key.q_sup() > tr.Nq) {
      fail(ErrorCode::TruncationExceeded, "perturbation term lies outside the truncation window");
    }
    TermKey shifted = key;
    shifted.k += 1;
    F.add_term(shifted, c);
  }
  return F;
}

namespace {

void finish(NormalFormResult& res, const IntegrableHamiltonian& H) {
  res.casimir = res.normal.filter([](const TermKey& key) { return key.q_free() && key.p_degree() == 0 && key.k >= 1; });
  res.remainder = res.normal - H.series - res.casimir;
  res.dropped_terms = res.normal.dropped();
}

}  // namespace

NormalFormResult formal_normal_form(const IntegrableHamiltonian& H, const PoissonSeries& Q) {
  NormalFormResult res{NormalFormKind::formal,
                       {},
                       perturbed_hamiltonian(H, Q),
                       PoissonSeries::empty_like(Q),
                       PoissonSeries::empty_like(Q),
                       PoissonSeries::empty_like(Q),
                       0,
                       {}};
  PoissonSeries F = res.input;
  for (int order = 1; order <= Q.trunc().Dt; ++order) {
    const PoissonSeries R = F.filter([order](const TermKey& key) { return key.k == order && !key.q_free(); });
    HomologicalSolution sol = homological_solve(H, R, Q.trunc().Dp);
    const std::uint64_t before = F.dropped();
    Generator gen = HamiltonianGenerator{sol.S};
    F = flow_apply(gen, F);
    res.generators.push_back(std::move(gen));
    res.diagnostics.push_back({order, sol.eliminated, sol.smallest, F.dropped() - before});
  }
  res.normal = F;
  finish(res, H);
  return res;
}

NormalFormResult kolmogorov_normal_form(const IntegrableHamiltonian& H, const PoissonSeries& Q) {
  const auto& tr = Q.trunc();
  if (tr.Dp < 2) fail(ErrorCode::TruncationExceeded, "the Kolmogorov normal form needs Dp >= 2");
  const int n = H.n();
  std::vector<std::vector<Scalar>> two_alpha = H.alpha;
  const Scalar two = Scalar::from_int(Q.context(), 2);
  for (auto& row : two_alpha) {
    for (auto& x : row) x *= two;
  }
  if (determinant(two_alpha).is_zero()) {
    fail(ErrorCode::DegenerateAlpha, "the quadratic part alpha of H is not invertible");
  }

  NormalFormResult res{NormalFormKind::kolmogorov,
                       {},
                       perturbed_hamiltonian(H, Q),
                       PoissonSeries::empty_like(Q),
                       PoissonSeries::empty_like(Q),
                       PoissonSeries::empty_like(Q),
                       0,
                       {}};
  PoissonSeries F = res.input;
  for (int order = 1; order <= tr.Dt; ++order) {
    OrderDiagnostics diag{order, 0, std::nullopt, 0};
    const std::uint64_t before = F.dropped();

    const PoissonSeries R = F.filter(
        [order](const TermKey& key) { return key.k == order && !key.q_free() && key.p_degree() <= 1; });
    if (!R.is_zero()) {
      HomologicalSolution sol = homological_solve(H, R, 1);
      diag.eliminated += sol.eliminated;
      merge_denominator(diag.smallest, sol.smallest);
      Generator gen = HamiltonianGenerator{sol.S};
      F = flow_apply(gen, F);
      res.generators.push_back(std::move(gen));
    }

    std::vector<Scalar> b(n, Scalar::zero(Q.context()));
    bool any = false;
    for (int j = 0; j < n; ++j) {
      b[j] = -F.coeff(key_of(Exponents{}, unit(j), order));
      any = any || !b[j].is_zero();
    }
    if (any) {
      auto d = solve_linear(two_alpha, b);
      if (!d) fail(ErrorCode::DegenerateAlpha, "the quadratic part alpha of H is not invertible");
      Generator gen = TranslationGenerator{order, *d};
      F = flow_apply(gen, F);
      res.generators.push_back(std::move(gen));
      diag.eliminated += static_cast<std::size_t>(std::count_if(d->begin(), d->end(), [](const Scalar& x) { return !x.is_zero(); }));
    }
    diag.dropped = F.dropped() - before;
    res.diagnostics.push_back(diag);
  }
  res.normal = F;
  finish(res, H);
  return res;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t pivot_row(const std::vector<std::vector<Scalar>>& A, std::size_t col) {
  std::size_t best = A.size();
  for (std::size_t r = col; r < A.size(); ++r) {
    if (A[r][col].is_zero()) continue;
    if (A[r][col].as_double() == nullptr) return r;
    if (best == A.size() || std::abs(*A[r][col].as_double()) > std::abs(*A[best][col].as_double())) best = r;
  }
  return best;
}

}  // namespace

std::optional<std::vector<Scalar>> solve_linear(std::vector<std::vector<Scalar>> A, std::vector<Scalar> b) {
  const std::size_t n = A.size();
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t p = pivot_row(A, c);
    if (p == n) return std::nullopt;
    std::swap(A[p], A[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (A[r][c].is_zero()) continue;
      const Scalar f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<Scalar> x(b);
  for (std::size_t i = n; i-- > 0;) {
    Scalar acc = b[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= A[i][k] * x[k];
    x[i] = acc / A[i][i];
  }
  return x;
}

Scalar determinant(std::vector<std::vector<Scalar>> A) {
  const std::size_t n = A.size();
  if (n == 0) return Scalar(Rational(1));
  const ScalarContext ctx = A[0][0].context();
  Scalar det = Scalar::one(ctx);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t p = pivot_row(A, c);
    if (p == n) return Scalar::zero(ctx);
    if (p != c) {
      std::swap(A[p], A[c]);
      det = -det;
    }
    det *= A[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (A[r][c].is_zero()) continue;
      const Scalar f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
    }
  }
  return det;
}

// ---------------------------------------------------------------------------

NormalSpaceClass normal_space_class(const IntegrableHamiltonian& H, const PoissonSeries& f) {
  H.series.require_compatible(f);
  const int n = H.n();
  for (const auto& [key, c] : f.terms()) {
    if (key.k != 0) fail(ErrorCode::InvalidArgument, "normal_space_class expects a t-free series");
  }
  const PoissonSeries R = f.filter([](const TermKey& key) { return !key.q_free() && key.p_degree() <= 1; });
  HomologicalSolution sol = homological_solve(H, R, 1);

  NormalSpaceClass cls{H.series, std::vector<Scalar>(n, Scalar::zero(f.context())), -sol.S,
                       PoissonSeries::empty_like(f), Scalar::zero(f.context())};
  const PoissonSeries rest = f - poisson_bracket(H.series, cls.g);
  for (const auto& [key, c] : rest.terms()) {
    const int deg = key.p_degree();
    if (deg >= 2) {
      cls.ideal_part.add_term(key, c);
    } else if (!key.q_free()) {
      fail(ErrorCode::TruncationExceeded, "q-dependent low-degree term survived the homological solve");
    } else if (deg == 0) {
      cls.constant = c;
    } else {
      for (int j = 0; j < n; ++j) {
        if (key.J[j] == 1) cls.nu[j] = c;
      }
    }
  }
  return cls;
}

NormalSpaceClass hyperbolic_normal_space_class(const PoissonSeries& f) {
  if (f.mode() != BracketMode::symplectic || f.n() != 1) {
    fail(ErrorCode::InvalidArgument, "the hyperbolic class needs a symplectic series with n = 1");
  }
  const ScalarContext ctx = f.context();
  TermKey pq;
  pq.I[0] = 1;
  pq.J[0] = 1;
  NormalSpaceClass cls{PoissonSeries::monomial(ctx, f.trunc(), f.mode(), pq, Scalar::one(ctx)),
                       {Scalar::zero(ctx)},
                       PoissonSeries::empty_like(f),
                       PoissonSeries::empty_like(f),
                       Scalar::zero(ctx)};
  for (const auto& [key, c] : f.terms()) {
    if (key.k != 0) fail(ErrorCode::InvalidArgument, "normal_space_class expects a t-free series");
    const int i = key.I[0];
    const int j = key.J[0];
    if (i < 0) fail(ErrorCode::InvalidArgument, "the symplectic algebra has no negative powers of q");
    if (i != j) {
      // {pq, q^i p^j} = (i - j) q^i p^j
      cls.g.add_term(key, c / Scalar::from_int(ctx, i - j));
    } else if (i == 0) {
      cls.constant = c;
    } else if (i == 1) {
      cls.nu[0] = c;
    } else {
      cls.ideal_part.add_term(key, c);
    }
  }
  return cls;
}

PoissonSeries reassemble(const NormalSpaceClass& cls) {
  const ScalarContext ctx = cls.hamiltonian.context();
  const auto& tr = cls.hamiltonian.trunc();
  const auto mode = cls.hamiltonian.mode();
  PoissonSeries out = poisson_bracket(cls.hamiltonian, cls.g) + cls.ideal_part;
  out += PoissonSeries::constant(ctx, tr, mode, cls.constant);
  if (mode == BracketMode::symplectic) {
    out += cls.hamiltonian.scaled(cls.nu[0]);
  } else {
    for (int j = 0; j < tr.n; ++j) {
      out += PoissonSeries::monomial(ctx, tr, mode, key_of(Exponents{}, unit(j), 0), cls.nu[j]);
    }
  }
  return out;
}

}  // namespace kamforge
