#include "dollda/normalize.hpp"

#include <cmath>

#include "dollda/kernels.hpp"

namespace dollda {

namespace {

void compute_row_stats(const Matrix& x, Vector& mean, Vector& stdev) {
  const Index l = x.rows();
  const Index n = x.cols();
  mean.resize(l);
  stdev.resize(l);
  for (Index i = 0; i < l; ++i) {
    double m = 0.0;
    for (Index j = 0; j < n; ++j) m += x(i, j);
    m /= static_cast<double>(n);
    double var = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double d = x(i, j) - m;
      var += d * d;
    }
    var /= static_cast<double>(n);  // population variance
    mean(i) = m;
    stdev(i) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
}

void unit_columns(Matrix& x) {
  for (Index j = 0; j < x.cols(); ++j) {
    const double norm = x.col(j).norm();
    if (norm > 0.0) x.col(j) /= norm;
  }
}

}  // namespace

Matrix normalize(const Matrix& x, NormalizeMode mode, NormalizeStats* stats_out) {
  if (stats_out) {
    stats_out->mode = mode;
    stats_out->mean.resize(0);
    stats_out->std.resize(0);
  }
  if (mode == NormalizeMode::None) return x;

  Matrix out = x;
  if (stats_out) {
    compute_row_stats(x, stats_out->mean, stats_out->std);
    out.colwise() -= stats_out->mean;
    out.array().colwise() /= stats_out->std.array();
  } else {
    kernels::zscore_rows(out);
  }
  if (mode == NormalizeMode::ZscoreUnit) unit_columns(out);
  return out;
}

Matrix normalize(const Matrix& x, NormalizeMode mode) { return normalize(x, mode, nullptr); }

Matrix apply_normalize(const Matrix& x, const NormalizeStats& stats) {
  if (stats.mode == NormalizeMode::None) return x;
  if (stats.mean.size() != x.rows())
    throw DataError("normalization statistics were fitted for " + std::to_string(stats.mean.size()) +
                    " features, got " + std::to_string(x.rows()));
  Matrix out = x;
  out.colwise() -= stats.mean;
  out.array().colwise() /= stats.std.array();
  if (stats.mode == NormalizeMode::ZscoreUnit) unit_columns(out);
  return out;
}

}  // namespace dollda
