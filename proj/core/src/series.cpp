#include "kamforge/series.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

#include "kamforge/errors.hpp"

namespace kamforge {

int TermKey::p_degree() const {
  int s = 0;
  for (auto j : J) s += j;
  return s;
}

int TermKey::q_sup() const {
  int m = 0;
  for (auto i : I) m = std::max(m, i < 0 ? -i : i);
  return m;
}

bool TermKey::q_free() const {
  return std::all_of(I.begin(), I.end(), [](auto i) { return i == 0; });
}

bool TruncationSpec::admits(const TermKey& key) const {
  return key.k >= 0 && key.k <= Dt && key.p_degree() <= Dp && key.q_sup() <= Nq;
}

std::string TruncationSpec::describe() const {
  std::ostringstream os;
  os << "n=" << n << " Dp=" << Dp << " Dt=" << Dt << " Nq=" << Nq;
  return os.str();
}

std::string_view to_string(BracketMode mode) { return mode == BracketMode::torus ? "torus" : "symplectic"; }

// ---------------------------------------------------------------------------

PoissonSeries::PoissonSeries(ScalarContext ctx, TruncationSpec trunc, BracketMode mode)
    : ctx_(ctx), trunc_(trunc), mode_(mode) {
  if (trunc.n < 1 || trunc.n > kMaxDim) {
    fail(ErrorCode::InvalidArgument, "dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (trunc.Dp < 0 || trunc.Dt < 0 || trunc.Nq < 0) {
    fail(ErrorCode::InvalidArgument, "truncation bounds must be nonnegative");
  }
}

PoissonSeries PoissonSeries::constant(ScalarContext ctx, TruncationSpec trunc, BracketMode mode, const Scalar& c) {
  return monomial(ctx, trunc, mode, TermKey{}, c);
}

PoissonSeries PoissonSeries::monomial(ScalarContext ctx, TruncationSpec trunc, BracketMode mode, const TermKey& key,
                                      const Scalar& c) {
  PoissonSeries out(ctx, trunc, mode);
  out.add_term(key, c);
  return out;
}

PoissonSeries PoissonSeries::empty_like(const PoissonSeries& like) {
  return PoissonSeries(like.ctx_, like.trunc_, like.mode_);
}

Scalar PoissonSeries::coeff(const TermKey& key) const {
  const auto it = terms_.find(key);
  return it == terms_.end() ? Scalar::zero(ctx_) : it->second;
}

void PoissonSeries::add_term(const TermKey& key, const Scalar& c) {
  if (c.is_zero()) return;
  if (!(c.context() == ctx_)) {
    fail(ErrorCode::ContextMismatch, "coefficient " + c.literal() + " is not in " + ctx_.describe());
  }
  if (!trunc_.admits(key)) {
    ++dropped_;
    return;
  }
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void PoissonSeries::set_term(const TermKey& key, const Scalar& c) {
  terms_.erase(key);
  add_term(key, c);
}

int PoissonSeries::min_t_degree() const {
  int m = -1;
  for (const auto& [key, c] : terms_) {
    if (m < 0 || key.k < m) m = key.k;
  }
  return m;
}

int PoissonSeries::max_p_degree() const {
  int m = -1;
  for (const auto& [key, c] : terms_) m = std::max(m, key.p_degree());
  return m;
}

PoissonSeries PoissonSeries::filter(const std::function<bool(const TermKey&)>& keep) const {
  PoissonSeries out = empty_like(*this);
  for (const auto& [key, c] : terms_) {
    if (keep(key)) out.terms_.emplace_hint(out.terms_.end(), key, c);
  }
  return out;
}

PoissonSeries PoissonSeries::t_order(int k) const {
  return filter([k](const TermKey& key) { return key.k == k; });
}

PoissonSeries PoissonSeries::scaled(const Scalar& c) const {
  PoissonSeries out = empty_like(*this);
  out.dropped_ = dropped_;
  if (c.is_zero()) return out;
  for (const auto& [key, v] : terms_) out.terms_.emplace_hint(out.terms_.end(), key, v * c);
  return out;
}

void PoissonSeries::require_compatible(const PoissonSeries& other) const {
  if (!(ctx_ == other.ctx_)) {
    fail(ErrorCode::ContextMismatch, "series contexts differ: " + ctx_.describe() + " vs " + other.ctx_.describe());
  }
  if (!(trunc_ == other.trunc_)) {
    fail(ErrorCode::ContextMismatch,
         "truncation windows differ: " + trunc_.describe() + " vs " + other.trunc_.describe());
  }
  if (mode_ != other.mode_) fail(ErrorCode::ContextMismatch, "bracket modes differ");
}

PoissonSeries PoissonSeries::operator-() const {
  PoissonSeries out = empty_like(*this);
  out.dropped_ = dropped_;
  for (const auto& [key, c] : terms_) out.terms_.emplace_hint(out.terms_.end(), key, -c);
  return out;
}

PoissonSeries& PoissonSeries::operator+=(const PoissonSeries& g) {
  require_compatible(g);
  for (const auto& [key, c] : g.terms_) add_term(key, c);
  dropped_ += g.dropped_;
  return *this;
}

PoissonSeries& PoissonSeries::operator-=(const PoissonSeries& g) {
  require_compatible(g);
  for (const auto& [key, c] : g.terms_) add_term(key, -c);
  dropped_ += g.dropped_;
  return *this;
}

PoissonSeries operator*(const PoissonSeries& f, const PoissonSeries& g) {
  f.require_compatible(g);
  PoissonSeries out = PoissonSeries::empty_like(f);
  const int n = f.n();
  for (const auto& [kf, cf] : f.terms_) {
    for (const auto& [kg, cg] : g.terms_) {
      TermKey key;
      for (int j = 0; j < n; ++j) {
        key.I[j] = kf.I[j] + kg.I[j];
        key.J[j] = kf.J[j] + kg.J[j];
      }
      key.k = kf.k + kg.k;
      out.add_term(key, cf * cg);
    }
  }
  return out;
}

bool operator==(const PoissonSeries& f, const PoissonSeries& g) {
  return f.ctx_ == g.ctx_ && f.trunc_ == g.trunc_ && f.mode_ == g.mode_ && f.terms_ == g.terms_;
}

std::string PoissonSeries::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  const int n = trunc_.n;
  for (const auto& [key, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.literal() << ")";
    auto vec = [&](const char* name, const Exponents& e) {
      bool zero = true;
      for (int j = 0; j < n; ++j) zero = zero && e[j] == 0;
      if (zero) return;
      os << " " << name << "^(";
      for (int j = 0; j < n; ++j) os << (j ? "," : "") << e[j];
      os << ")";
    };
    vec("q", key.I);
    vec("p", key.J);
    if (key.k) os << " t^" << key.k;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

PoissonSeries bracket_impl(const PoissonSeries& f, const PoissonSeries& g, int sign) {
  f.require_compatible(g);
  PoissonSeries out = PoissonSeries::empty_like(f);
  const int n = f.n();
  const bool symplectic = f.mode() == BracketMode::symplectic;
  for (const auto& [kf, cf] : f.terms()) {
    for (const auto& [kg, cg] : g.terms()) {
      std::optional<Scalar> product;
      for (int j = 0; j < n; ++j) {
        const long w = static_cast<long>(kf.J[j]) * kg.I[j] - static_cast<long>(kf.I[j]) * kg.J[j];
        if (w == 0) continue;
        if (!product) product = cf * cg;
        TermKey key;
        for (int i = 0; i < n; ++i) {
          key.I[i] = kf.I[i] + kg.I[i];
          key.J[i] = kf.J[i] + kg.J[i];
        }
        key.J[j] -= 1;
        if (symplectic) key.I[j] -= 1;
        key.k = kf.k + kg.k;
        out.add_term(key, *product * Scalar::from_int(f.context(), sign * w));
      }
    }
  }
  return out;
}

Scalar binomial(const ScalarContext& ctx, int n, int k) {
  Rational r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return Scalar::from_rational(ctx, r);
}

Scalar power(const Scalar& x, int e) {
  Scalar r = Scalar::one(x.context());
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

PoissonSeries translate(const TranslationGenerator& gen, const PoissonSeries& f) {
  if (static_cast<int>(gen.d.size()) != f.n()) {
    fail(ErrorCode::InvalidArgument, "translation vector has length " + std::to_string(gen.d.size()) +
                                         " but the series has n = " + std::to_string(f.n()));
  }
  PoissonSeries out = PoissonSeries::empty_like(f);
  out.add_dropped(f.dropped());
  const int n = f.n();
  for (const auto& [key, c] : f.terms()) {
    // Expand prod_j (p_j + d_j t^order)^{J_j} one variable at a time.
    std::vector<std::pair<TermKey, Scalar>> partial{{key, c}};
    for (int j = 0; j < n; ++j) {
      const int e = key.J[j];
      if (e == 0) continue;
      std::vector<std::pair<TermKey, Scalar>> next;
      for (const auto& [pk, pc] : partial) {
        for (int a = 0; a <= e; ++a) {
          const int moved = e - a;
          if (moved > 0 && gen.d[j].is_zero()) continue;
          TermKey nk = pk;
          nk.J[j] = a;
          nk.k += gen.order * moved;
          next.emplace_back(nk, pc * binomial(f.context(), e, a) * power(gen.d[j], moved));
        }
      }
      partial = std::move(next);
    }
    for (const auto& [pk, pc] : partial) out.add_term(pk, pc);
  }
  return out;
}

PoissonSeries hamiltonian_flow(const HamiltonianGenerator& gen, const PoissonSeries& f) {
  f.require_compatible(gen.S);
  PoissonSeries result = f;
  PoissonSeries term = f;
  for (long m = 1; !term.is_zero(); ++m) {
    term = poisson_bracket(term, gen.S).scaled(Scalar::from_rational(f.context(), Rational(1, m)));
    result += term;
  }
  return result;
}

}  // namespace

PoissonSeries poisson_bracket(const PoissonSeries& f, const PoissonSeries& g) { return bracket_impl(f, g, 1); }

PoissonSeries poisson_bracket_flipped(const PoissonSeries& f, const PoissonSeries& g) {
  return bracket_impl(f, g, -1);
}

PoissonSeries average(const PoissonSeries& f) {
  return f.filter([](const TermKey& key) { return key.q_free(); });
}

void validate(const Generator& gen) {
  if (const auto* h = std::get_if<HamiltonianGenerator>(&gen)) {
    if (!h->S.is_zero() && h->S.min_t_degree() < 1) {
      fail(ErrorCode::GeneratorOrderViolation, "hamiltonian generator has a term of t-degree 0");
    }
  } else {
    const auto& tr = std::get<TranslationGenerator>(gen);
    if (tr.order < 1) fail(ErrorCode::GeneratorOrderViolation, "translation order must be >= 1");
  }
}

Generator inverse(const Generator& gen) {
  if (const auto* h = std::get_if<HamiltonianGenerator>(&gen)) return HamiltonianGenerator{-h->S};
  TranslationGenerator tr = std::get<TranslationGenerator>(gen);
  for (auto& x : tr.d) x = -x;
  return tr;
}

std::string describe(const Generator& gen) {
  if (const auto* h = std::get_if<HamiltonianGenerator>(&gen)) return "hamiltonian S = " + h->S.to_string();
  const auto& tr = std::get<TranslationGenerator>(gen);
  std::string s = "translation order " + std::to_string(tr.order) + " d = (";
  for (std::size_t i = 0; i < tr.d.size(); ++i) s += (i ? ", " : "") + tr.d[i].literal();
  return s + ")";
}

PoissonSeries flow_apply(const Generator& gen, const PoissonSeries& f) {
  validate(gen);
  if (const auto* h = std::get_if<HamiltonianGenerator>(&gen)) return hamiltonian_flow(*h, f);
  return translate(std::get<TranslationGenerator>(gen), f);
}

PoissonSeries compose_flows(const std::vector<Generator>& gens, const PoissonSeries& f) {
  PoissonSeries out = f;
  for (const auto& g : gens) out = flow_apply(g, out);
  return out;
}

}  // namespace kamforge
