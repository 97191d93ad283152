#ifndef DOLLDA_NORMALIZE_HPP
#define DOLLDA_NORMALIZE_HPP

#include "dollda/config.hpp"
#include "dollda/types.hpp"

namespace dollda {

/// Feature statistics of a z-score pass, kept so held-out samples can be
/// transformed consistently.
struct NormalizeStats {
  NormalizeMode mode = NormalizeMode::None;
  Vector mean;  // per feature row
  Vector std;   // per feature row; 1 where the variance was zero
};

// Zscore: per feature row subtract the mean and divide by the population
// standard deviation (zero-variance rows are centered only). ZscoreUnit
// additionally scales each sample column to unit Euclidean norm.
Matrix normalize(const Matrix& x, NormalizeMode mode);
Matrix normalize(const Matrix& x, NormalizeMode mode, NormalizeStats* stats_out);

/// Applies previously fitted statistics to new columns.
Matrix apply_normalize(const Matrix& x, const NormalizeStats& stats);

}  // namespace dollda

#endif  // DOLLDA_NORMALIZE_HPP
