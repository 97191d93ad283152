#include "dollda/dataset.hpp"

#include <vector>

namespace dollda {

void DaDataset::validate() const {
  if (x.rows() < 1 || x.cols() < 1) throw DataError("dataset has an empty feature matrix");
  if (n_source < 1) throw DataError("dataset has no source samples");
  if (n_target < 1) throw DataError("dataset has no target samples");
  if (n_source + n_target != x.cols())
    throw DataError("n_source + n_target = " + std::to_string(n_source + n_target) +
                    " does not match " + std::to_string(x.cols()) + " sample columns");
  if (static_cast<Index>(source_labels.size()) != n_source)
    throw DataError("source label count " + std::to_string(source_labels.size()) +
                    " does not match n_source = " + std::to_string(n_source));
  if (class_count < 1) throw DataError("class_count must be >= 1");
  std::vector<bool> seen(static_cast<std::size_t>(class_count), false);
  for (std::size_t i = 0; i < source_labels.size(); ++i) {
    const int label = source_labels[i];
    if (label < 1 || label > class_count)
      throw DataError("source label " + std::to_string(label) + " at position " +
                      std::to_string(i) + " is outside 1.." + std::to_string(class_count));
    seen[static_cast<std::size_t>(label - 1)] = true;
  }
  for (int c = 0; c < class_count; ++c)
    if (!seen[static_cast<std::size_t>(c)])
      throw DataError("class " + std::to_string(c + 1) + " has no source samples");
  if (!x.allFinite()) throw DataError("dataset contains non-finite features");
}

}  // namespace dollda
