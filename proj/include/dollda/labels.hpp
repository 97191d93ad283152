#ifndef DOLLDA_LABELS_HPP
#define DOLLDA_LABELS_HPP

#include "dollda/types.hpp"

namespace dollda {

/// n x k label matrix: per row, the first class_count entries are a point on
/// the probability simplex and the remaining k - class_count entries are zero.
struct EmbeddedLabels {
  Matrix values;  // n x k
  int class_count = 0;

  Index n() const { return values.rows(); }
  Index k() const { return values.cols(); }
};

/// One-hot rows padded with k - class_count zeros.
/// Throws ConfigError if k < class_count, DataError on out-of-range labels.
EmbeddedLabels embed_labels(const LabelVector& labels, int class_count, int k);

/// Per-row argmax over the first class_count entries; ties go to the lowest class.
LabelVector hard_labels(const EmbeddedLabels& y);
LabelVector hard_labels(const Matrix& rows, int class_count);

/// Checks simplex/zero-padding invariants, throws DataError with the row index.
void check_embedded_invariants(const EmbeddedLabels& y, double tol = 1e-9);

}  // namespace dollda

#endif  // DOLLDA_LABELS_HPP
