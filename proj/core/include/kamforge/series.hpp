#pragma once

// Truncated Poisson series in K[q, 1/q][[p, t]] and the formal flows acting on them.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "kamforge/scalar.hpp"

namespace kamforge {

inline constexpr int kMaxDim = 6;

using Exponents = std::array<std::int32_t, kMaxDim>;

/// Monomial q^I p^J t^k. Unused trailing slots stay zero.
struct TermKey {
  Exponents I{};
  Exponents J{};
  std::int32_t k = 0;

  int p_degree() const;
  int q_sup() const;
  bool q_free() const;
  auto operator<=>(const TermKey&) const = default;
};

struct TruncationSpec {
  int n = 1;
  int Dp = 0;
  int Dt = 0;
  int Nq = 0;

  bool admits(const TermKey& key) const;
  std::string describe() const;
  friend bool operator==(const TruncationSpec&, const TruncationSpec&) = default;
};

enum class BracketMode : std::uint8_t { torus, symplectic };

std::string_view to_string(BracketMode mode);

class PoissonSeries {
 public:
  using TermMap = std::map<TermKey, Scalar>;

  PoissonSeries(ScalarContext ctx, TruncationSpec trunc, BracketMode mode = BracketMode::torus);

  static PoissonSeries constant(ScalarContext ctx, TruncationSpec trunc, BracketMode mode, const Scalar& c);
  static PoissonSeries monomial(ScalarContext ctx, TruncationSpec trunc, BracketMode mode, const TermKey& key,
                                const Scalar& c);
  /// Same context, window and mode as `like`, no terms.
  static PoissonSeries empty_like(const PoissonSeries& like);

  const ScalarContext& context() const noexcept { return ctx_; }
  const TruncationSpec& trunc() const noexcept { return trunc_; }
  BracketMode mode() const noexcept { return mode_; }
  int n() const noexcept { return trunc_.n; }
  const TermMap& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Number of terms discarded by the truncation window while producing this
  /// value. Metadata only: equality ignores it.
  std::uint64_t dropped() const noexcept { return dropped_; }
  void add_dropped(std::uint64_t count) noexcept { dropped_ += count; }

  Scalar coeff(const TermKey& key) const;
  /// Accumulates c into the key; terms outside the window are counted as dropped.
  void add_term(const TermKey& key, const Scalar& c);
  void set_term(const TermKey& key, const Scalar& c);

  int min_t_degree() const;  // -1 for the zero series
  int max_p_degree() const;  // -1 for the zero series

  PoissonSeries filter(const std::function<bool(const TermKey&)>& keep) const;
  PoissonSeries t_order(int k) const;
  PoissonSeries scaled(const Scalar& c) const;

  void require_compatible(const PoissonSeries& other) const;

  PoissonSeries operator-() const;
  PoissonSeries& operator+=(const PoissonSeries& g);
  PoissonSeries& operator-=(const PoissonSeries& g);
  friend PoissonSeries operator+(PoissonSeries f, const PoissonSeries& g) { return f += g; }
  friend PoissonSeries operator-(PoissonSeries f, const PoissonSeries& g) { return f -= g; }
  friend PoissonSeries operator*(const PoissonSeries& f, const PoissonSeries& g);
  friend bool operator==(const PoissonSeries& f, const PoissonSeries& g);

  std::string to_string() const;

 private:
  ScalarContext ctx_;
  TruncationSpec trunc_;
  BracketMode mode_;
  TermMap terms_;
  std::uint64_t dropped_ = 0;
};

/// {f, g}. Torus mode: {p_j, q_k} = q_k delta_jk. Symplectic mode: {p_j, q_k} = delta_jk.
PoissonSeries poisson_bracket(const PoissonSeries& f, const PoissonSeries& g);

/// Same engine with the sign of every elementary bracket reversed. Exists only
/// for the mutation fixture of the self-test.
PoissonSeries poisson_bracket_flipped(const PoissonSeries& f, const PoissonSeries& g);

/// Torus average: the terms with I = 0.
PoissonSeries average(const PoissonSeries& f);

struct HamiltonianGenerator {
  PoissonSeries S;
};

/// p_j -> p_j + d_j t^order.
struct TranslationGenerator {
  int order = 1;
  std::vector<Scalar> d;
};

using Generator = std::variant<HamiltonianGenerator, TranslationGenerator>;

void validate(const Generator& gen);
Generator inverse(const Generator& gen);
std::string describe(const Generator& gen);

/// exp(ad_S) f with ad_S(f) = {f, S}, or the translation substitution.
PoissonSeries flow_apply(const Generator& gen, const PoissonSeries& f);
PoissonSeries compose_flows(const std::vector<Generator>& gens, const PoissonSeries& f);

}  // namespace kamforge
