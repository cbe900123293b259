#include "kamforge/lie.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cfloat>
#include <cmath>
#include <random>

#include "kamforge/errors.hpp"

namespace kamforge {

Vector vec(const Matrix& M) {
  Vector v(M.size());
  Eigen::Index idx = 0;
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) v(idx++) = M(r, c);
  }
  return v;
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  Matrix M(rows, cols);
  Eigen::Index idx = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = v(idx++);
  }
  return M;
}

Matrix commutator(const Matrix& A, const Matrix& B) { return A * B - B * A; }

double trace_inner(const Matrix& A, const Matrix& B) { return (A.array() * B.array()).sum(); }

namespace {

void require_square(const Matrix& A, const char* what) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " must be a nonempty square matrix");
  }
  if (!A.allFinite()) fail(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
}

Matrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Matrix X(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) X(r, c) = dist(rng);
  }
  return X;
}

}  // namespace

SubspaceBasis commutant_basis(const Matrix& A) {
  require_square(A, "A");
  const Eigen::Index n = A.rows();
  const Eigen::Index n2 = n * n;
  Matrix S(n2, n2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Matrix E = Matrix::Zero(n, n);
      E(i, j) = 1.0;
      S.col(i * n + j) = vec(E * A - A * E);
    }
  }
  Eigen::JacobiSVD<Matrix> svd(S, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double smax = sigma.size() ? sigma(0) : 0.0;
  SubspaceBasis basis;
  basis.orthonormal = true;
  for (Eigen::Index k = 0; k < n2; ++k) {
    if (smax == 0.0 || sigma(k) < 1e-10 * smax) basis.elements.push_back(unvec(svd.matrixV().col(k), n, n));
  }
  return basis;
}

double orthogonality_residual(const Matrix& A, const SubspaceBasis& transversal, const Matrix& X) {
  const Matrix AX = commutator(A, X);
  double worst = 0.0;
  for (const auto& B : transversal.elements) worst = std::max(worst, std::fabs(trace_inner(AX, B)));
  return worst;
}

SubspaceBasis transversal_from_commutant(const Matrix& A, std::uint64_t seed, int checks) {
  SubspaceBasis basis = commutant_basis(A);
  for (auto& B : basis.elements) B.transposeInPlace();
  std::mt19937_64 rng(seed);
  const double scale = std::max(1.0, A.norm());
  for (int c = 0; c < checks; ++c) {
    const Matrix X = random_matrix(A.rows(), rng);
    const double r = orthogonality_residual(A, basis, X);
    if (r > 1e-10 * scale * X.norm()) {
      fail(ErrorCode::OrthogonalityCheckFailed, "transversal element not orthogonal to the orbit tangent (residual " +
                                                    std::to_string(r) + ")");
    }
  }
  return basis;
}

Matrix matrix_exp(const Matrix& X) {
  require_square(X, "X");
  const Eigen::Index n = X.rows();
  const double norm1 = X.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > 0.5) s = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Matrix Y = X / std::ldexp(1.0, s);
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 30; ++k) {
    term = term * Y / static_cast<double>(k);
    result += term;
    const double tn = term.cwiseAbs().maxCoeff();
    if (tn == 0.0 || tn <= 1e-18 * result.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < s; ++i) result = result * result;
  return result;
}

// ---------------------------------------------------------------------------

Vector StandardAction::infinitesimal(const Matrix& xi, const Vector& a) const { return xi * a; }

Vector StandardAction::act(const Matrix& g, const Matrix&, const Vector& v) const { return g * v; }

Vector AdjointAction::infinitesimal(const Matrix& xi, const Vector& a) const {
  const Matrix A = unvec(a, n_, n_);
  return vec(commutator(xi, A));
}

Vector AdjointAction::act(const Matrix& g, const Matrix& g_inv, const Vector& v) const {
  return vec(g * unvec(v, n_, n_) * g_inv);
}

RightInverse least_squares_right_inverse(const LinearAction& action, const Vector& a) {
  const Eigen::Index n = action.group_dim();
  Matrix M(a.size(), n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Matrix E = Matrix::Zero(n, n);
      E(i, j) = 1.0;
      M.col(i * n + j) = action.infinitesimal(E, a);
    }
  }
  auto cod = std::make_shared<Eigen::CompleteOrthogonalDecomposition<Matrix>>(M);
  return [cod, n](const Vector& v) { return unvec(cod->solve(v), n, n); };
}

// ---------------------------------------------------------------------------

namespace {

void finish_trace(IterationTrace& trace) {
  std::vector<double> errors;
  for (const auto& s : trace.steps) errors.push_back(s.b_norm);
  errors.push_back(trace.final_error);
  if (errors.size() >= 2 && errors[0] > 0) trace.measured_C = errors[1] / (errors[0] * errors[0]);
  try {
    trace.order = convergence_order(errors);
  } catch (const Error&) {
    trace.order.reset();
  }
}

}  // namespace

HomogeneousResult lie_iterate_homogeneous(const LinearAction& action, const Vector& a, const Vector& b,
                                          const RightInverse& j, const LieOptions& opts) {
  if (a.size() != b.size()) fail(ErrorCode::InvalidArgument, "point and perturbation differ in size");
  const Eigen::Index n = action.group_dim();
  HomogeneousResult res;
  res.trace.basin = opts.basin.value_or(a.norm() > 0 ? 0.5 * a.norm() : 0.5);
  if (b.norm() > res.trace.basin) {
    fail(ErrorCode::BasinExceeded, "|b| = " + std::to_string(b.norm()) + " exceeds the basin radius " +
                                       std::to_string(res.trace.basin));
  }

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 4; ++trial) {
    Vector v(a.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
    const double miss = (action.infinitesimal(j(v), a) - v).norm();
    if (miss > 1e-10 * v.norm()) {
      fail(ErrorCode::RightInverseCheckFailed, "j is not a right inverse of the infinitesimal action at a");
    }
  }

  Vector bn = b;
  Matrix g = Matrix::Identity(n, n);
  Matrix g_inv = Matrix::Identity(n, n);
  for (int it = 0;; ++it) {
    const double e = bn.norm();
    if (e <= opts.tol) {
      res.trace.final_error = e;
      res.trace.termination = "converged";
      break;
    }
    if (it == opts.max_iter) {
      fail(ErrorCode::NoConvergence, "max_iter reached with |b| = " + std::to_string(e));
    }
    const Matrix xi = j(bn);
    const Matrix E = matrix_exp(-xi);
    const Matrix E_inv = matrix_exp(xi);
    const Vector next = action.act(E, E_inv, a + bn) - a;
    res.trace.steps.push_back({e, xi.norm(), 0.0});
    res.generators.push_back(xi);
    g = E * g;
    g_inv = g_inv * E_inv;
    if (next.norm() >= e && next.norm() > opts.tol) {
      fail(ErrorCode::NoConvergence, "error stopped decreasing at |b| = " + std::to_string(e));
    }
    bn = next;
  }
  res.group_element = g;
  res.final_point = action.act(g, g_inv, a + b);
  res.residual = res.final_point - a;
  finish_trace(res.trace);
  return res;
}

double default_parametric_basin(const Matrix& a) {
  require_square(a, "a");
  Eigen::EigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) return 0.05;
  const auto& lambda = es.eigenvalues();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
  const auto& sv = svd.singularValues();
  const bool diagonalizable = sv(sv.size() - 1) > 1e-8 * sv(0);
  const double tiny = 1e-12 * std::max(1.0, a.norm());
  double gap = HUGE_VAL;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    for (Eigen::Index k = i + 1; k < lambda.size(); ++k) {
      const double d = std::abs(lambda(i) - lambda(k));
      if (d > tiny) gap = std::min(gap, d);
    }
  }
  if (diagonalizable && std::isfinite(gap)) return 0.1 * gap;
  return 0.05;
}

ParametricResult lie_iterate_parametric(const Matrix& a, const Matrix& b, const SubspaceBasis& transversal,
                                        const LieOptions& opts) {
  require_square(a, "a");
  if (b.rows() != a.rows() || b.cols() != a.cols()) fail(ErrorCode::InvalidArgument, "a and b differ in shape");
  const Eigen::Index n = a.rows();
  const Eigen::Index n2 = n * n;
  const Eigen::Index k = static_cast<Eigen::Index>(transversal.dim());

  ParametricResult res;
  res.trace.basin = opts.basin.value_or(default_parametric_basin(a));
  if (b.norm() > res.trace.basin) {
    fail(ErrorCode::BasinExceeded, "|b| = " + std::to_string(b.norm()) + " exceeds the basin radius " +
                                       std::to_string(res.trace.basin));
  }

  Matrix an = a;
  Matrix bn = b;
  Matrix g = Matrix::Identity(n, n);
  Matrix g_inv = Matrix::Identity(n, n);
  res.alpha_total = Matrix::Zero(n, n);
  for (int it = 0;; ++it) {
    const double e = bn.norm();
    if (e <= opts.tol) {
      res.trace.final_error = e;
      res.trace.termination = "converged";
      break;
    }
    if (it == opts.max_iter) fail(ErrorCode::NoConvergence, "max_iter reached with |b| = " + std::to_string(e));

    Matrix M(n2, k + n2);
    for (Eigen::Index i = 0; i < k; ++i) M.col(i) = vec(transversal.elements[static_cast<std::size_t>(i)]);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        Matrix E = Matrix::Zero(n, n);
        E(r, c) = 1.0;
        M.col(k + r * n + c) = vec(commutator(E, an));
      }
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
    cod.setThreshold(1e-10);
    cod.compute(M);
    if (cod.rank() < n2) {
      fail(ErrorCode::RankDeficient, "transversal plus orbit tangent has rank " + std::to_string(cod.rank()) +
                                         " < " + std::to_string(n2));
    }
    const Vector sol = cod.solve(vec(bn));
    Matrix alpha = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < k; ++i) alpha += sol(i) * transversal.elements[static_cast<std::size_t>(i)];
    const Matrix xi = unvec(sol.tail(n2), n, n);

    const Matrix E = matrix_exp(-xi);
    const Matrix E_inv = matrix_exp(xi);
    const Matrix next = E * (an + bn) * E_inv - (an + alpha);
    an += alpha;
    res.alpha_total += alpha;
    res.trace.steps.push_back({e, xi.norm(), alpha.norm()});
    res.generators.push_back(xi);
    g = E * g;
    g_inv = g_inv * E_inv;
    if (next.norm() >= e && next.norm() > opts.tol) {
      fail(ErrorCode::NoConvergence, "error stopped decreasing at |b| = " + std::to_string(e));
    }
    bn = next;
  }
  res.group_element = g;
  res.final_point = g * (a + b) * g_inv;
  res.residual = res.final_point - a - res.alpha_total;
  finish_trace(res.trace);
  return res;
}

// ---------------------------------------------------------------------------

double convergence_order(const std::vector<double>& errors) {
  const double floor = 100 * DBL_EPSILON;
  std::size_t usable = 0;
  while (usable < errors.size() && errors[usable] > floor) ++usable;
  if (usable < 3) fail(ErrorCode::InsufficientSteps, "need at least 3 errors above 100 eps");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i + 1 < usable; ++i) {
    xs.push_back(std::log(errors[i]));
    ys.push_back(std::log(errors[i + 1]));
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) fail(ErrorCode::InsufficientSteps, "errors do not vary");
  return sxy / sxx;
}

double convergence_order(const IterationTrace& trace) {
  std::vector<double> errors;
  for (const auto& s : trace.steps) errors.push_back(s.b_norm);
  errors.push_back(trace.final_error);
  return convergence_order(errors);
}

}  // namespace kamforge
