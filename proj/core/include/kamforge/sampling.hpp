#pragma once

// Seeded random inputs for property checks.

#include <random>

#include "kamforge/normalform.hpp"
#include "kamforge/series.hpp"

namespace kamforge {

struct SeriesShape {
  int max_terms = 4;
  int max_p_degree = 2;
  int max_q = 1;  // sup-norm bound on I; symplectic series draw I >= 0
  int min_t = 0;
  int max_t = 1;
  int coef_range = 5;
};

Scalar random_scalar(const ScalarContext& ctx, std::mt19937_64& rng, int range = 5);
PoissonSeries random_series(const ScalarContext& ctx, const TruncationSpec& trunc, BracketMode mode,
                            const SeriesShape& shape, std::mt19937_64& rng);
/// Nonzero lattice vector with |I|_inf <= N.
LatticeVector random_lattice(int n, int N, std::mt19937_64& rng);

}  // namespace kamforge
