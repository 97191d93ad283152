#ifndef DOLLDA_MATRIX_IO_HPP
#define DOLLDA_MATRIX_IO_HPP

#include <string>

#include "dollda/types.hpp"

namespace dollda {

enum class MatrixFormat { Csv, Fbin };

/// Picks Fbin for paths ending in ".fbin", Csv otherwise.
MatrixFormat format_from_path(const std::string& path);

// Matrices are features (rows) x samples (columns). The fbin container is
// "FMAT", version u32=1, rows u64, cols u64, then float64 row-major, all
// little-endian; round-trips are bit-exact. CSV is one matrix row per line.
// Loads reject NaN/Inf entries and report the offending row/column.
Matrix load_matrix(const std::string& path, MatrixFormat format);
void save_matrix(const Matrix& x, const std::string& path, MatrixFormat format);

Matrix load_matrix(const std::string& path);
void save_matrix(const Matrix& x, const std::string& path);

/// Label files are one integer per line, classes 1..C.
LabelVector load_labels(const std::string& path);
void save_labels(const LabelVector& labels, const std::string& path);

/// FNV-1a digest of a matrix's fbin byte image, for reproducibility audits.
std::string matrix_digest(const Matrix& x);

}  // namespace dollda

#endif  // DOLLDA_MATRIX_IO_HPP
