#pragma once

#include <optional>
#include <vector>

#include "kamforge/series.hpp"

namespace kamforge {

using LatticeVector = std::vector<int>;

/// H in K[[p]] together with its linear and (symmetrized) quadratic coefficients.
struct IntegrableHamiltonian {
  PoissonSeries series;
  std::vector<Scalar> omega;
  std::vector<std::vector<Scalar>> alpha;

  /// Rejects series with q- or t-dependence or a constant term.
  static IntegrableHamiltonian from_series(const PoissonSeries& h);

  int n() const { return series.n(); }
  /// (omega, I).
  Scalar pairing(const Exponents& I) const;
};

/// Nonzero I with |I|_inf <= N and (omega, I) = 0, first nonzero entry positive.
std::vector<LatticeVector> resonances(const std::vector<Scalar>& omega, int N);

/// Smallest |(omega, I)| met by a solve, with the vector that produced it.
struct DenominatorRecord {
  Scalar value;
  LatticeVector vector;
};

struct OrderDiagnostics {
  int order = 0;
  std::size_t eliminated = 0;
  std::optional<DenominatorRecord> smallest;
  std::uint64_t dropped = 0;
};

struct HomologicalSolution {
  PoissonSeries S;
  PoissonSeries residual;
  std::size_t eliminated = 0;
  std::optional<DenominatorRecord> smallest;
};

/// Finds S with p-degree <= p_cap and I != 0 such that {H, S} + R - residual = 0,
/// the residual holding the average part of R and whatever lies above p_cap.
HomologicalSolution homological_solve(const IntegrableHamiltonian& H, const PoissonSeries& R, int p_cap);

enum class NormalFormKind : std::uint8_t { formal, kolmogorov };

struct NormalFormResult {
  NormalFormKind kind = NormalFormKind::formal;
  std::vector<Generator> generators;
  PoissonSeries input;  // H + tQ as it entered the window
  PoissonSeries normal;
  PoissonSeries casimir;
  PoissonSeries remainder;
  std::uint64_t dropped_terms = 0;
  std::vector<OrderDiagnostics> diagnostics;
};

/// H + tQ with Q's terms shifted by one t-degree. Terms of Q outside the p or q
/// window raise TruncationExceeded; t-degrees past Dt are dropped and counted.
PoissonSeries perturbed_hamiltonian(const IntegrableHamiltonian& H, const PoissonSeries& Q);

NormalFormResult formal_normal_form(const IntegrableHamiltonian& H, const PoissonSeries& Q);
NormalFormResult kolmogorov_normal_form(const IntegrableHamiltonian& H, const PoissonSeries& Q);

/// Solves A x = b exactly (or with partial pivoting in float64).
/// Returns nullopt when A is singular.
std::optional<std::vector<Scalar>> solve_linear(std::vector<std::vector<Scalar>> A, std::vector<Scalar> b);
Scalar determinant(std::vector<std::vector<Scalar>> A);

struct NormalSpaceClass {
  PoissonSeries hamiltonian;
  std::vector<Scalar> nu;  // torus: coordinates on [p_1..p_n]; hyperbolic: the single [pq] coefficient
  PoissonSeries g;
  PoissonSeries ideal_part;
  Scalar constant;
};

/// Class of f in N(H, (p_1..p_n)) for nonresonant H on the torus. f must be t-free.
NormalSpaceClass normal_space_class(const IntegrableHamiltonian& H, const PoissonSeries& f);

/// Class of f in N(pq, (pq)) = K[pq] in the symplectic algebra K[[q, p]], n = 1.
NormalSpaceClass hyperbolic_normal_space_class(const PoissonSeries& f);

/// {H, g} + ideal_part + constant + sum nu_i p_i (or nu pq in the hyperbolic case).
PoissonSeries reassemble(const NormalSpaceClass& cls);

}  // namespace kamforge
