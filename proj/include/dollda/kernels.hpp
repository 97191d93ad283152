#ifndef DOLLDA_KERNELS_HPP
#define DOLLDA_KERNELS_HPP

#include "dollda/types.hpp"

namespace dollda::kernels {

// Data-parallel inner loops, OpenMP-parallelized over output rows/columns.
// Every kernel assigns each output element to exactly one thread and keeps a
// fixed sequential accumulation order, so results are bit-identical to the
// serial reference twins in kernels::reference for any thread count.

/// out(i,j) = squared Euclidean distance between column i of a and column j of b.
void pairwise_sqdist(const Matrix& a, const Matrix& b, Matrix& out);

/// out = sum_m signs[m] * v_m v_m^T over the columns v_m of components.
void weighted_gram_accumulate(const Matrix& components, const Vector& signs, Matrix& out);

/// In place: per row subtract the mean and divide by the population standard
/// deviation; rows with zero variance are centered only.
void zscore_rows(Matrix& x);

/// In place: per row, Euclidean projection of the first c entries onto the
/// probability simplex; entries c..cols-1 are set to zero.
void simplex_project_rows(Matrix& y, int c);

namespace reference {
void pairwise_sqdist(const Matrix& a, const Matrix& b, Matrix& out);
void weighted_gram_accumulate(const Matrix& components, const Vector& signs, Matrix& out);
void zscore_rows(Matrix& x);
void simplex_project_rows(Matrix& y, int c);
}  // namespace reference

/// Sorted-threshold Euclidean projection of one vector onto {p >= 0, sum p = 1}.
Vector project_to_simplex(const Vector& v);

}  // namespace dollda::kernels

#endif  // DOLLDA_KERNELS_HPP
