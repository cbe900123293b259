#pragma once

// Commutants, transversal slices and the Lie iterations for linear actions of GL(n).

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kamforge {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SubspaceBasis {
  std::vector<Matrix> elements;
  bool orthonormal = false;

  std::size_t dim() const { return elements.size(); }
};

/// Row-major flattening and its inverse.
Vector vec(const Matrix& M);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

Matrix commutator(const Matrix& A, const Matrix& B);
/// Trace inner product Tr(A B^T).
double trace_inner(const Matrix& A, const Matrix& B);

/// Orthonormal basis of {X : XA - AX = 0}.
SubspaceBasis commutant_basis(const Matrix& A);

/// Transposed commutant, which is orthogonal to the tangent space of the adjoint
/// orbit. `checks` random commutators are tested against every element.
SubspaceBasis transversal_from_commutant(const Matrix& A, std::uint64_t seed = 0, int checks = 16);

/// max_B |<[A, X], B>| over the elements B of a transversal.
double orthogonality_residual(const Matrix& A, const SubspaceBasis& transversal, const Matrix& X);

Matrix matrix_exp(const Matrix& X);

/// A linear action of GL(n) on a real vector space. Points are flattened.
class LinearAction {
 public:
  virtual ~LinearAction() = default;
  virtual std::string name() const = 0;
  /// n for gl(n).
  virtual Eigen::Index group_dim() const = 0;
  /// rho(xi)(a), the infinitesimal action.
  virtual Vector infinitesimal(const Matrix& xi, const Vector& a) const = 0;
  /// g . v given g and its inverse.
  virtual Vector act(const Matrix& g, const Matrix& g_inv, const Vector& v) const = 0;
};

/// g . v = g v on R^n.
class StandardAction final : public LinearAction {
 public:
  explicit StandardAction(Eigen::Index n) : n_(n) {}
  std::string name() const override { return "standard"; }
  Eigen::Index group_dim() const override { return n_; }
  Vector infinitesimal(const Matrix& xi, const Vector& a) const override;
  Vector act(const Matrix& g, const Matrix& g_inv, const Vector& v) const override;

 private:
  Eigen::Index n_;
};

/// g . V = g V g^-1 on n x n matrices, flattened row-major.
class AdjointAction final : public LinearAction {
 public:
  explicit AdjointAction(Eigen::Index n) : n_(n) {}
  std::string name() const override { return "adjoint"; }
  Eigen::Index group_dim() const override { return n_; }
  Vector infinitesimal(const Matrix& xi, const Vector& a) const override;
  Vector act(const Matrix& g, const Matrix& g_inv, const Vector& v) const override;

 private:
  Eigen::Index n_;
};

using RightInverse = std::function<Matrix(const Vector&)>;

/// Minimal-norm least-squares solution xi of rho(xi)(a) = v.
RightInverse least_squares_right_inverse(const LinearAction& action, const Vector& a);

struct IterationStep {
  double b_norm = 0.0;
  double xi_norm = 0.0;
  double alpha_norm = 0.0;
};

struct IterationTrace {
  std::vector<IterationStep> steps;
  double final_error = 0.0;
  std::optional<double> order;
  std::optional<double> measured_C;  // |b_1| / |b_0|^2
  std::string termination;
  double basin = 0.0;
};

struct LieOptions {
  int max_iter = 50;
  double tol = 1e-13;
  std::optional<double> basin;
  std::uint64_t seed = 0;
};

struct HomogeneousResult {
  std::vector<Matrix> generators;
  Matrix group_element;  // prod e^{-xi_i}, last factor leftmost
  Vector final_point;    // group_element . (a + b)
  Vector residual;       // final_point - a
  IterationTrace trace;
};

HomogeneousResult lie_iterate_homogeneous(const LinearAction& action, const Vector& a, const Vector& b,
                                          const RightInverse& j, const LieOptions& opts = {});

struct ParametricResult {
  std::vector<Matrix> generators;
  Matrix alpha_total;
  Matrix group_element;
  Matrix final_point;  // g (a + b) g^-1
  Matrix residual;     // final_point - a - alpha_total
  IterationTrace trace;
};

/// Default basin radius: 0.1 times the smallest gap between distinct eigenvalues
/// when a is diagonalizable, 0.05 otherwise.
double default_parametric_basin(const Matrix& a);

ParametricResult lie_iterate_parametric(const Matrix& a, const Matrix& b, const SubspaceBasis& transversal,
                                        const LieOptions& opts = {});

/// Least-squares slope of log e_{n+1} against log e_n over errors above 100 eps.
double convergence_order(const std::vector<double>& errors);
double convergence_order(const IterationTrace& trace);

}  // namespace kamforge
