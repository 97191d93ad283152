#include "dollda/labels.hpp"

#include <cmath>
#include <string>

namespace dollda {

EmbeddedLabels embed_labels(const LabelVector& labels, int class_count, int k) {
  if (class_count < 1) throw ConfigError("class_count must be >= 1");
  if (k < class_count)
    throw ConfigError("subspace dimension k=" + std::to_string(k) +
                      " must be >= class count C=" + std::to_string(class_count));
  EmbeddedLabels y;
  y.class_count = class_count;
  y.values = Matrix::Zero(static_cast<Index>(labels.size()), k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label < 1 || label > class_count)
      throw DataError("label " + std::to_string(label) + " at position " + std::to_string(i) +
                      " is outside 1.." + std::to_string(class_count));
    y.values(static_cast<Index>(i), label - 1) = 1.0;
  }
  return y;
}

LabelVector hard_labels(const Matrix& rows, int class_count) {
  LabelVector out(static_cast<std::size_t>(rows.rows()));
  for (Index i = 0; i < rows.rows(); ++i) {
    int best = 0;
    double best_value = rows(i, 0);
    for (int c = 1; c < class_count; ++c) {
      if (rows(i, c) > best_value) {  // strict: ties keep the lowest class
        best_value = rows(i, c);
        best = c;
      }
    }
    out[static_cast<std::size_t>(i)] = best + 1;
  }
  return out;
}

LabelVector hard_labels(const EmbeddedLabels& y) { return hard_labels(y.values, y.class_count); }

void check_embedded_invariants(const EmbeddedLabels& y, double tol) {
  const int c = y.class_count;
  for (Index i = 0; i < y.values.rows(); ++i) {
    double sum = 0.0;
    for (Index j = 0; j < y.values.cols(); ++j) {
      const double v = y.values(i, j);
      if (!std::isfinite(v)) throw DataError("non-finite label entry at row " + std::to_string(i));
      if (j < c) {
        if (v < -tol) throw DataError("negative class probability at row " + std::to_string(i));
        sum += v;
      } else if (v != 0.0) {
        throw DataError("nonzero padding entry at row " + std::to_string(i));
      }
    }
    if (std::abs(sum - 1.0) > tol)
      throw DataError("class probabilities at row " + std::to_string(i) + " sum to " +
                      std::to_string(sum));
  }
}

}  // namespace dollda
