#ifndef DOLLDA_DATASET_HPP
#define DOLLDA_DATASET_HPP

#include "dollda/types.hpp"

namespace dollda {

/// Packed source + target samples. The first n_source columns of x are the
/// labeled source domain, the rest the unlabeled target domain. Target truth
/// labels are deliberately not part of this type.
struct DaDataset {
  Matrix x;               // l x (n_source + n_target)
  Index n_source = 0;
  Index n_target = 0;
  LabelVector source_labels;  // length n_source, values 1..class_count
  int class_count = 0;

  Index dim() const { return x.rows(); }
  Index total() const { return x.cols(); }

  Matrix source_block() const { return x.leftCols(n_source); }
  Matrix target_block() const { return x.rightCols(n_target); }

  /// Throws DataError unless counts match, labels are in 1..C, and every class
  /// appears at least once in the source.
  void validate() const;
};

}  // namespace dollda

#endif  // DOLLDA_DATASET_HPP
