#include <gtest/gtest.h>

#include <cfloat>
#include <random>

#include "../oracles/oracles.hpp"
#include "kamforge/errors.hpp"
#include "kamforge/lie.hpp"

using namespace kamforge;

namespace {

Matrix M2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Matrix random_matrix(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g;
  Matrix X(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) X(i, j) = scale * g(rng);
  return X;
}

// distance from X to span(B)
double off_span(const Matrix& X, const SubspaceBasis& B) {
  Matrix r = X;
  for (const auto& e : B.elements) r -= trace_inner(X, e) * e;
  return r.norm();
}

}  // namespace

TEST(Commutant, Diagonal) {
  const auto C = commutant_basis(M2(1, 0, 0, 2));
  ASSERT_EQ(C.dim(), 2u);
  EXPECT_TRUE(C.orthonormal);
  EXPECT_LT(off_span(M2(1, 0, 0, 0), C), 1e-12);
  EXPECT_LT(off_span(M2(0, 0, 0, 1), C), 1e-12);
}

TEST(Commutant, NilpotentJordanBlock) {
  const Matrix A = M2(0, 1, 0, 0);
  const auto C = commutant_basis(A);
  ASSERT_EQ(C.dim(), 2u);
  EXPECT_LT(off_span(Matrix::Identity(2, 2), C), 1e-12);
  EXPECT_LT(off_span(A, C), 1e-12);
}

TEST(Commutant, IdentityIsEverything) {
  EXPECT_EQ(commutant_basis(Matrix::Identity(3, 3)).dim(), 9u);
}

TEST(Commutant, GenericDimension) {
  std::mt19937_64 rng(2);
  for (int n : {2, 3, 4}) {
    for (int i = 0; i < 5; ++i) EXPECT_EQ(commutant_basis(random_matrix(n, rng)).dim(), static_cast<std::size_t>(n));
  }
}

TEST(Transversal, NilpotentIsLowerTriangular) {
  const auto F = transversal_from_commutant(M2(0, 1, 0, 0));
  ASSERT_EQ(F.dim(), 2u);
  EXPECT_LT(off_span(Matrix::Identity(2, 2), F), 1e-12);
  EXPECT_LT(off_span(M2(0, 0, 1, 0), F), 1e-12);
}

TEST(Transversal, DiagonalSelfTransposed) {
  const auto F = transversal_from_commutant(M2(1, 0, 0, 2));
  EXPECT_LT(off_span(M2(1, 0, 0, 0), F), 1e-12);
  EXPECT_LT(off_span(M2(0, 0, 0, 1), F), 1e-12);
}

TEST(Transversal, OrthogonalToOrbitTangent) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    const Matrix A = random_matrix(3, rng);
    const auto F = transversal_from_commutant(A, i);
    EXPECT_LE(orthogonality_residual(A, F, random_matrix(3, rng)), 1e-10);
  }
}

TEST(MatrixExp, Basics) {
  EXPECT_EQ(matrix_exp(Matrix::Zero(3, 3)), Matrix::Identity(3, 3));
  const Matrix d = matrix_exp(M2(0.5, 0, 0, -2));
  EXPECT_NEAR(d(0, 0), std::exp(0.5), 4 * DBL_EPSILON * std::exp(0.5));
  EXPECT_NEAR(d(1, 1), std::exp(-2.0), 4 * DBL_EPSILON);
  EXPECT_EQ(d(0, 1), 0.0);
  EXPECT_EQ(matrix_exp(M2(0, 3, 0, 0)), M2(1, 3, 0, 1));
}

TEST(MatrixExp, MatchesEigenOracle) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const Matrix X = random_matrix(4, rng, 0.2 + 0.1 * (i % 30));
    const Matrix ref = oracle::expm(X);
    EXPECT_LE((matrix_exp(X) - ref).norm(), 1e-12 * std::max(1.0, ref.norm()));
  }
}

TEST(Homogeneous, ZeroPerturbation) {
  StandardAction act(2);
  Vector a(2);
  a << 1, 0;
  const auto r = lie_iterate_homogeneous(act, a, Vector::Zero(2), least_squares_right_inverse(act, a));
  EXPECT_TRUE(r.generators.empty());
  EXPECT_EQ(r.group_element, Matrix::Identity(2, 2));
}

TEST(Homogeneous, ScalarClosedForm) {
  StandardAction act(1);
  Vector a(1), b(1);
  a << 1;
  b << 0.1;
  const auto r = lie_iterate_homogeneous(act, a, b, least_squares_right_inverse(act, a));
  EXPECT_NEAR(r.group_element(0, 0), 1 / 1.1, 1e-12);
}

TEST(Homogeneous, QuadraticOnVectors) {
  StandardAction act(3);
  Vector a = Vector::Zero(3);
  a(0) = 1;
  Vector b(3);
  b << 0.006, -0.005, 0.006;
  b *= 1e-2 / b.norm();
  const auto r = lie_iterate_homogeneous(act, a, b, least_squares_right_inverse(act, a));
  const auto& st = r.trace.steps;
  ASSERT_GE(st.size(), 2u);
  for (std::size_t i = 0; i + 1 < st.size(); ++i) {
    if (st[i + 1].b_norm < 1e-14) break;
    EXPECT_LE(st[i + 1].b_norm, 5 * st[i].b_norm * st[i].b_norm);
  }
  EXPECT_LE(r.residual.norm(), 1e-13);
}

TEST(Homogeneous, BasinGuard) {
  StandardAction act(1);
  Vector a(1), b(1);
  a << 1;
  b << 0.9;
  try {
    (void)lie_iterate_homogeneous(act, a, b, least_squares_right_inverse(act, a));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BasinExceeded);
  }
}

TEST(Parametric, DiagonalRecoversEigenvalues) {
  const Matrix a = M2(1, 0, 0, 2);
  std::mt19937_64 rng(5);
  std::vector<double> xs, ys;
  for (int i = 0; i < 10; ++i) {
    Matrix b = random_matrix(2, rng);
    b *= 0.02 / b.norm();
    const auto r = lie_iterate_parametric(a, b, transversal_from_commutant(a));
    const Matrix nf = a + r.alpha_total;
    EXPECT_LE(std::fabs(nf(0, 1)) + std::fabs(nf(1, 0)), 1e-12);
    const auto ev = oracle::real_eigenvalues_sorted(a + b);
    std::vector<double> got{nf(0, 0), nf(1, 1)};
    std::sort(got.begin(), got.end());
    EXPECT_NEAR(got[0], ev[0], 1e-10);
    EXPECT_NEAR(got[1], ev[1], 1e-10);
    ASSERT_TRUE(r.trace.order);
    EXPECT_GE(*r.trace.order, 1.5);
    const auto& st = r.trace.steps;
    for (std::size_t k = 0; k + 1 < st.size(); ++k) {
      if (st[k + 1].b_norm <= 100 * DBL_EPSILON) break;
      xs.push_back(std::log(st[k].b_norm));
      ys.push_back(std::log(st[k + 1].b_norm));
    }
  }
  // pooled slope of log e_{n+1} against log e_n
  const double m = xs.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / m, my += ys[i] / m;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
  EXPECT_GE(sxy / sxx, 1.8);
}

TEST(Parametric, NilpotentInvariants) {
  const Matrix a = M2(0, 1, 0, 0);
  const Matrix b = M2(0.003, -0.002, 0.004, 0.001);
  const auto r = lie_iterate_parametric(a, b, transversal_from_commutant(a));
  const Matrix nf = a + r.alpha_total;
  const Matrix ab = a + b;
  const double l1 = ab.trace() / 2;
  const double l2 = ab.trace() * ab.trace() / 4 - ab.determinant();
  EXPECT_NEAR(nf(0, 0), l1, 1e-8);
  EXPECT_NEAR(nf(1, 1), l1, 1e-8);
  EXPECT_NEAR(nf(0, 1), 1.0, 1e-8);
  EXPECT_NEAR(nf(1, 0), l2, 1e-8);
}

TEST(Parametric, ZeroPerturbation) {
  const Matrix a = M2(1, 0, 0, 2);
  const auto r = lie_iterate_parametric(a, Matrix::Zero(2, 2), transversal_from_commutant(a));
  EXPECT_TRUE(r.trace.steps.empty() || r.generators.empty());
  EXPECT_EQ(r.alpha_total, Matrix::Zero(2, 2));
}

TEST(Parametric, DefaultBasin) {
  EXPECT_NEAR(default_parametric_basin(M2(1, 0, 0, 2)), 0.1, 1e-12);
  EXPECT_NEAR(default_parametric_basin(M2(0, 1, 0, 0)), 0.05, 1e-12);
}

TEST(ConvergenceOrder, Synthetic) {
  std::vector<double> sq{1e-1};
  while (sq.back() > 1e-13) sq.push_back(sq.back() * sq.back());
  EXPECT_NEAR(convergence_order(sq), 2.0, 1e-6);
  std::vector<double> lin{1e-1};
  for (int i = 0; i < 20; ++i) lin.push_back(lin.back() * 0.5);
  EXPECT_NEAR(convergence_order(lin), 1.0, 1e-6);
  EXPECT_THROW((void)convergence_order(std::vector<double>{1e-1, 1e-2}), Error);
}
