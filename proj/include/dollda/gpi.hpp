#ifndef DOLLDA_GPI_HPP
#define DOLLDA_GPI_HPP

#include <vector>

#include "dollda/types.hpp"

namespace dollda {

/// Lower-triangular factor h with h h^T = H + delta*I, where H = I - (1/n) 11^T.
/// H itself has rank n-1, so delta > 0 is required.
struct CenteringFactor {
  Index n = 0;
  Matrix h;
  double delta = 0.0;
};

CenteringFactor factor_centering(Index n, double delta);

/// min_{W^T W = I} tr(W^T B W - 2 W^T C) with B symmetric and mu chosen so that
/// mu*I - B is positive definite.
struct GpiProblem {
  Matrix b;   // n x n, symmetrized
  Matrix c;   // n x k
  double mu = 0.0;

  Matrix b_prime() const;  // mu*I - b
};

/// Shift making mu*I - B positive definite: the Gershgorin row-sum upper bound
/// on lambda_max(B) plus a relative margin of 1e-6*(1+bound).
double gpi_shift_bound(const Matrix& b);

/// Builds the problem from the data-side quantities:
///   Q = X H^T H X^T + beta*diag(g) + alpha*I + X M* X^T   (l x l)
///   B = P^+ Q (P^T)^+ with P = X h, symmetrized; C = h^{-1} H^T H Y;
///   mu = Gershgorin row-sum bound of B plus margin 1e-6*(1+bound).
/// g_diag has length l (one weight per feature row of the projection).
GpiProblem assemble_gpi(const Matrix& x, const CenteringFactor& h, const Matrix& m_star,
                        const Vector& g_diag, const Matrix& y, double alpha, double beta);

struct GpiResult {
  Matrix w;                            // Stiefel point, ||W^T W - I||_F <= 1e-8
  std::vector<double> objective_trace; // f(W_t), non-increasing
  int iterations = 0;
};

/// Power iteration: Z = 2(mu*I - B)W + 2C, thin SVD Z = U S V^T, W <- U V^T.
/// Stops when the relative change of f(W) = tr(W^T B W - 2 W^T C) drops below
/// tol or after max_iter sweeps.
GpiResult gpi_iterate(const GpiProblem& problem, const Matrix& w0, double tol, int max_iter);

/// Minimum-norm solution of (X h)^T A = W.
Matrix recover_a(const Matrix& w, const Matrix& x, const CenteringFactor& h);

/// Closed-form bias: e = (1/n) (Y^T 1 - A^T X 1).
Vector update_e(const Matrix& x, const Matrix& a, const Matrix& y);

/// Reweighting diagonal for the smoothed squared l2,1 penalty. Entry j is
/// S / sqrt(||a^j||^2 + eps) with S = sum over the first min(rows, cols)
/// rows i of sqrt(||a^i||^2 + eps); output length = rows of A.
Vector update_g(const Matrix& a, double epsilon);

struct EigenInit {
  Matrix a;            // l x k, columns normalized so A^T (X H X^T) A = I
  Vector eigenvalues;  // ascending
};

/// k smallest eigenpairs of (X M X^T + alpha*I) A = (X H X^T) A diag(phi).
/// Column signs are fixed so the largest-magnitude entry is positive.
EigenInit init_a_eigen(const Matrix& x, const Matrix& m, const Matrix& h_mat, double alpha,
                       int k);

/// Dense centering matrix I - (1/n) 11^T (tests and the eigen-init use it).
Matrix centering_matrix(Index n);

}  // namespace dollda

#endif  // DOLLDA_GPI_HPP
