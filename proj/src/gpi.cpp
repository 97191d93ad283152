#include "dollda/gpi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dollda {

namespace {

void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite())
    throw NumericalError(std::string("non-finite entries while assembling ") + name);
}

// Largest-magnitude entry of each column made positive (first index wins ties)
// so eigenvector bases are reproducible.
void fix_column_signs(Matrix& a) {
  for (Index j = 0; j < a.cols(); ++j) {
    Index arg = 0;
    double best = std::abs(a(0, j));
    for (Index i = 1; i < a.rows(); ++i) {
      const double mag = std::abs(a(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (a(arg, j) < 0.0) a.col(j) = -a.col(j);
  }
}

}  // namespace

double gpi_shift_bound(const Matrix& b) {
  double bound = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < b.rows(); ++i) {
    double row = b(i, i);
    for (Index j = 0; j < b.cols(); ++j)
      if (j != i) row += std::abs(b(i, j));
    bound = std::max(bound, row);
  }
  return bound + 1e-6 * (1.0 + std::abs(bound));
}

Matrix centering_matrix(Index n) {
  return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
}

CenteringFactor factor_centering(Index n, double delta) {
  if (n < 2) throw ConfigError("centering factor requires n >= 2");
  if (!(delta > 0.0))
    throw ConfigError("centering delta must be > 0 (H alone is singular)");
  Matrix reg = centering_matrix(n);
  reg.diagonal().array() += delta;
  Eigen::LLT<Matrix> llt(reg);
  if (llt.info() != Eigen::Success)
    throw NumericalError("Cholesky factorization of H + delta*I failed");
  CenteringFactor out;
  out.n = n;
  out.h = llt.matrixL();
  out.delta = delta;
  return out;
}

Matrix GpiProblem::b_prime() const {
  Matrix out = -b;
  out.diagonal().array() += mu;
  return out;
}

GpiProblem assemble_gpi(const Matrix& x, const CenteringFactor& h, const Matrix& m_star,
                        const Vector& g_diag, const Matrix& y, double alpha, double beta) {
  const Index l = x.rows();
  const Index n = x.cols();
  if (h.n != n) throw ConfigError("assemble_gpi: centering factor size mismatch");
  if (m_star.rows() != n || m_star.cols() != n)
    throw ConfigError("assemble_gpi: M* must be n x n");
  if (y.rows() != n) throw ConfigError("assemble_gpi: Y must have n rows");
  if (g_diag.size() != l) throw ConfigError("assemble_gpi: g diagonal must have one entry per feature");
  if ((g_diag.array() <= 0.0).any()) throw ConfigError("assemble_gpi: g diagonal must be positive");

  // Q = X H^T H X^T + beta*G + alpha*I + X M* X^T; H is an idempotent
  // projector, so X H^T H X^T = (XH)(XH)^T with XH = X minus its row means.
  Matrix xc = x;
  xc.colwise() -= x.rowwise().mean();
  Matrix q = xc * xc.transpose();
  q += (x * m_star) * x.transpose();
  q.diagonal() += beta * g_diag;
  q.diagonal().array() += alpha;
  require_finite(q, "Q");

  const Matrix p = x * h.h;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(p);
  const Matrix pinv = cod.pseudoInverse();  // n x l
  Matrix b = pinv * q * pinv.transpose();
  b = 0.5 * (b + b.transpose()).eval();
  require_finite(b, "B");

  // C = h^{-1} H^T H Y, applying the centering projector twice.
  Matrix hy = y;
  hy.rowwise() -= y.colwise().mean();
  hy.rowwise() -= hy.colwise().mean().eval();
  const Matrix c = h.h.triangularView<Eigen::Lower>().solve(hy);
  require_finite(c, "C");

  GpiProblem problem;
  problem.b = std::move(b);
  problem.c = c;
  problem.mu = gpi_shift_bound(problem.b);
  return problem;
}

GpiResult gpi_iterate(const GpiProblem& problem, const Matrix& w0, double tol, int max_iter) {
  const Index n = problem.b.rows();
  const Index k = w0.cols();
  if (w0.rows() != n) throw ConfigError("gpi_iterate: W0 row count must match B");
  if (k > n) throw ConfigError("gpi_iterate: k must not exceed n");
  if (problem.c.size() != 0 && (problem.c.rows() != n || problem.c.cols() != k))
    throw ConfigError("gpi_iterate: C shape mismatch");
  {
    const double ortho = (w0.transpose() * w0 - Matrix::Identity(k, k)).norm();
    if (!(ortho <= 1e-6))
      throw NumericalError("gpi_iterate: W0 is not orthonormal (residual " +
                           std::to_string(ortho) + ")");
  }
  const bool has_c = problem.c.size() != 0;

  auto objective = [&](const Matrix& w, const Matrix& bw) {
    double f = w.cwiseProduct(bw).sum();
    if (has_c) f -= 2.0 * w.cwiseProduct(problem.c).sum();
    return f;
  };

  GpiResult result;
  Matrix w = w0;
  Matrix bw = problem.b * w;
  double f_prev = objective(w, bw);
  result.objective_trace.push_back(f_prev);

  for (int iter = 0; iter < max_iter; ++iter) {
    Matrix z = 2.0 * (problem.mu * w - bw);
    if (has_c) z += 2.0 * problem.c;

    for (int attempt = 0;; ++attempt) {
      Eigen::BDCSVD<Matrix> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto& sv = svd.singularValues();
      const bool degenerate =
          !sv.allFinite() || sv(sv.size() - 1) <= sv(0) * 1e-14 || sv(0) == 0.0;
      if (!degenerate) {
        w = svd.matrixU() * svd.matrixV().transpose();
        break;
      }
      if (attempt >= 1) throw NumericalError("gpi_iterate: SVD of a rank-deficient update failed");
      const double scale = 1e-12 * std::max(z.norm(), 1.0);
      for (Index i = 0; i < k; ++i) z(i, i) += scale;
    }

    bw = problem.b * w;
    const double f = objective(w, bw);
    result.objective_trace.push_back(f);
    result.iterations = iter + 1;
    if (std::abs(f - f_prev) <= tol * std::max(1.0, std::abs(f_prev))) {
      f_prev = f;
      break;
    }
    f_prev = f;
  }
  result.w = std::move(w);
  return result;
}

Matrix recover_a(const Matrix& w, const Matrix& x, const CenteringFactor& h) {
  const Matrix pt = (x * h.h).transpose();  // n x l
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(pt);
  return cod.solve(w);
}

Vector update_e(const Matrix& x, const Matrix& a, const Matrix& y) {
  const double n = static_cast<double>(x.cols());
  const Vector y_sums = y.colwise().sum();
  const Vector z_sums = a.transpose() * x.rowwise().sum();
  return (y_sums - z_sums) / n;
}

Vector update_g(const Matrix& a, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("update_g: epsilon must be > 0");
  const Index rows = a.rows();
  const Index limit = std::min(rows, a.cols());
  Vector smoothed(rows);
  for (Index i = 0; i < rows; ++i) smoothed(i) = std::sqrt(a.row(i).squaredNorm() + epsilon);
  double total = 0.0;
  for (Index i = 0; i < limit; ++i) total += smoothed(i);
  return (total / smoothed.array()).matrix();
}

EigenInit init_a_eigen(const Matrix& x, const Matrix& m, const Matrix& h_mat, double alpha,
                       int k) {
  const Index l = x.rows();
  const Index n = x.cols();
  if (k < 1 || k > l)
    throw ConfigError("init_a_eigen: k = " + std::to_string(k) + " must be in 1.." +
                      std::to_string(l));
  if (m.rows() != n || m.cols() != n) throw ConfigError("init_a_eigen: M must be n x n");
  if (h_mat.rows() != n || h_mat.cols() != n) throw ConfigError("init_a_eigen: H must be n x n");

  Matrix lhs = x * m * x.transpose();
  lhs.diagonal().array() += alpha;
  lhs = 0.5 * (lhs + lhs.transpose()).eval();
  Matrix rhs = x * h_mat * x.transpose();
  rhs = 0.5 * (rhs + rhs.transpose()).eval();
  require_finite(lhs, "eigen-init LHS");
  require_finite(rhs, "eigen-init RHS");

  // Reduce A x = lambda B x to a standard problem via B = L L^T. B can be
  // numerically singular (H has rank n-1), so jitter the diagonal until the
  // factorization succeeds.
  Eigen::LLT<Matrix> llt(rhs);
  double jitter = 1e-12 * std::max(1.0, rhs.trace() / static_cast<double>(l));
  int attempts = 0;
  while (llt.info() != Eigen::Success) {
    if (++attempts > 40) throw NumericalError("init_a_eigen: constraint matrix factorization failed");
    rhs.diagonal().array() += jitter;
    jitter *= 2.0;
    llt.compute(rhs);
  }
  const Matrix li = Matrix(llt.matrixL()).triangularView<Eigen::Lower>().solve(
      Matrix::Identity(l, l));
  Matrix reduced = li * lhs * li.transpose();
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(reduced);
  if (es.info() != Eigen::Success) throw NumericalError("init_a_eigen: eigensolve failed");

  EigenInit out;
  out.a = li.transpose() * es.eigenvectors().leftCols(k);  // ascending eigenvalues
  out.eigenvalues = es.eigenvalues().head(k);
  fix_column_signs(out.a);
  return out;
}

}  // namespace dollda
