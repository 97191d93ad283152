#include "dollda/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dollda::kernels {

namespace detail {

inline double column_sqdist(const Matrix& a, const Matrix& b, Index i, Index j) {
  double acc = 0.0;
  for (Index f = 0; f < a.rows(); ++f) {
    const double d = a(f, i) - b(f, j);
    acc += d * d;
  }
  return acc;
}

// out(i,j) for row i of the component matrix pair: fixed component order, so
// the sum is bit-identical no matter how rows are scheduled.
inline void gram_row(const Matrix& components, const Vector& signs, Matrix& out, Index i) {
  const Index n = components.rows();
  const Index m = components.cols();
  for (Index j = 0; j < n; ++j) {
    double acc = 0.0;
    for (Index t = 0; t < m; ++t) acc += signs(t) * components(i, t) * components(j, t);
    out(i, j) = acc;
  }
}

inline void zscore_row(Matrix& x, Index i) {
  const Index n = x.cols();
  double mean = 0.0;
  for (Index j = 0; j < n; ++j) mean += x(i, j);
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (Index j = 0; j < n; ++j) {
    const double d = x(i, j) - mean;
    var += d * d;
  }
  var /= static_cast<double>(n);
  const double stdev = var > 0.0 ? std::sqrt(var) : 1.0;
  for (Index j = 0; j < n; ++j) x(i, j) = (x(i, j) - mean) / stdev;
}

inline void simplex_row(Matrix& y, int c, Index i, std::vector<double>& scratch) {
  scratch.assign(static_cast<std::size_t>(c), 0.0);
  for (int j = 0; j < c; ++j) scratch[static_cast<std::size_t>(j)] = y(i, j);
  std::sort(scratch.begin(), scratch.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (int j = 0; j < c; ++j) {
    cumulative += scratch[static_cast<std::size_t>(j)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (scratch[static_cast<std::size_t>(j)] - candidate > 0.0) theta = candidate;
  }
  for (int j = 0; j < c; ++j) y(i, j) = std::max(y(i, j) - theta, 0.0);
  for (Index j = c; j < y.cols(); ++j) y(i, j) = 0.0;
}

}  // namespace detail

void pairwise_sqdist(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.rows() != b.rows()) throw DataError("pairwise_sqdist: feature dimensions differ");
  out.resize(a.cols(), b.cols());
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < b.cols(); ++j)
    for (Index i = 0; i < a.cols(); ++i) out(i, j) = detail::column_sqdist(a, b, i, j);
}

void weighted_gram_accumulate(const Matrix& components, const Vector& signs, Matrix& out) {
  const Index n = components.rows();
  out.resize(n, n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) detail::gram_row(components, signs, out, i);
}

void zscore_rows(Matrix& x) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < x.rows(); ++i) detail::zscore_row(x, i);
}

void simplex_project_rows(Matrix& y, int c) {
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (Index i = 0; i < y.rows(); ++i) detail::simplex_row(y, c, i, scratch);
  }
}

namespace reference {

void pairwise_sqdist(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.rows() != b.rows()) throw DataError("pairwise_sqdist: feature dimensions differ");
  out.resize(a.cols(), b.cols());
  for (Index j = 0; j < b.cols(); ++j)
    for (Index i = 0; i < a.cols(); ++i) out(i, j) = detail::column_sqdist(a, b, i, j);
}

void weighted_gram_accumulate(const Matrix& components, const Vector& signs, Matrix& out) {
  const Index n = components.rows();
  out.resize(n, n);
  for (Index i = 0; i < n; ++i) detail::gram_row(components, signs, out, i);
}

void zscore_rows(Matrix& x) {
  for (Index i = 0; i < x.rows(); ++i) detail::zscore_row(x, i);
}

void simplex_project_rows(Matrix& y, int c) {
  std::vector<double> scratch;
  for (Index i = 0; i < y.rows(); ++i) detail::simplex_row(y, c, i, scratch);
}

}  // namespace reference

Vector project_to_simplex(const Vector& v) {
  Matrix row(1, v.size());
  row.row(0) = v.transpose();
  reference::simplex_project_rows(row, static_cast<int>(v.size()));
  return row.row(0).transpose();
}

}  // namespace dollda::kernels
