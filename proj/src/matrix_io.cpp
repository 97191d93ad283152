#include "dollda/matrix_io.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

namespace dollda {

namespace {

constexpr char kMagic[4] = {'F', 'M', 'A', 'T'};
constexpr std::uint32_t kVersion = 1;

// All fbin fields are little-endian. The build targets little-endian hosts;
// the writers below are byte-order explicit anyway.
template <typename T>
void write_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

Matrix load_fbin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open matrix file '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("'" + path + "': missing FMAT magic, not an fbin matrix");
  const auto version = read_le<std::uint32_t>(in);
  if (version != kVersion)
    throw DataError("'" + path + "': unsupported fbin version " + std::to_string(version));
  const auto rows = read_le<std::uint64_t>(in);
  const auto cols = read_le<std::uint64_t>(in);
  if (!in || rows == 0 || cols == 0)
    throw DataError("'" + path + "': bad header dimensions " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  if (rows > (1ull << 32) || cols > (1ull << 32) || rows * cols > (1ull << 34))
    throw DataError("'" + path + "': implausible dimensions");
  Matrix x(static_cast<Index>(rows), static_cast<Index>(cols));
  std::vector<double> row(cols);
  for (std::uint64_t i = 0; i < rows; ++i) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(cols * sizeof(double)));
    if (!in)
      throw DataError("'" + path + "': truncated payload at row " + std::to_string(i + 1));
    for (std::uint64_t j = 0; j < cols; ++j) {
      if (!std::isfinite(row[j]))
        throw DataError("'" + path + "': non-finite entry at row " + std::to_string(i + 1) +
                        ", column " + std::to_string(j + 1));
      x(static_cast<Index>(i), static_cast<Index>(j)) = row[j];
    }
  }
  return x;
}

void save_fbin(const Matrix& x, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write matrix file '" + path + "'");
  out.write(kMagic, 4);
  write_le<std::uint32_t>(out, kVersion);
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(x.rows()));
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(x.cols()));
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) write_le<double>(out, x(i, j));
  if (!out) throw DataError("write failure on '" + path + "'");
}

Matrix load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw DataError("'" + path + "': unparsable value '" + cell + "' at row " +
                        std::to_string(lineno) + ", column " + std::to_string(col));
      }
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size())
        throw DataError("'" + path + "': trailing junk in '" + cell + "' at row " +
                        std::to_string(lineno) + ", column " + std::to_string(col));
      if (!std::isfinite(value))
        throw DataError("'" + path + "': non-finite entry at row " + std::to_string(lineno) +
                        ", column " + std::to_string(col));
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError("'" + path + "': row " + std::to_string(lineno) + " has " +
                      std::to_string(row.size()) + " columns, expected " +
                      std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw DataError("'" + path + "': empty matrix");
  Matrix x(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return x;
}

void save_csv(const Matrix& x, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write matrix file '" + path + "'");
  out << std::setprecision(17);
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (j) out << ',';
      out << x(i, j);
    }
    out << '\n';
  }
  if (!out) throw DataError("write failure on '" + path + "'");
}

}  // namespace

MatrixFormat format_from_path(const std::string& path) {
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".fbin") == 0) return MatrixFormat::Fbin;
  return MatrixFormat::Csv;
}

Matrix load_matrix(const std::string& path, MatrixFormat format) {
  return format == MatrixFormat::Fbin ? load_fbin(path) : load_csv(path);
}

void save_matrix(const Matrix& x, const std::string& path, MatrixFormat format) {
  if (x.rows() == 0 || x.cols() == 0) throw DataError("refusing to save an empty matrix");
  format == MatrixFormat::Fbin ? save_fbin(x, path) : save_csv(x, path);
}

Matrix load_matrix(const std::string& path) { return load_matrix(path, format_from_path(path)); }

void save_matrix(const Matrix& x, const std::string& path) {
  save_matrix(x, path, format_from_path(path));
}

LabelVector load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label file '" + path + "'");
  LabelVector labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      const int value = std::stoi(line, &used);
      while (used < line.size() && std::isspace(static_cast<unsigned char>(line[used]))) ++used;
      if (used != line.size()) throw std::invalid_argument("junk");
      labels.push_back(value);
    } catch (const std::exception&) {
      throw DataError("'" + path + "': unparsable label at line " + std::to_string(lineno));
    }
  }
  if (labels.empty()) throw DataError("'" + path + "': no labels");
  return labels;
}

void save_labels(const LabelVector& labels, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write label file '" + path + "'");
  for (int label : labels) out << label << '\n';
  if (!out) throw DataError("write failure on '" + path + "'");
}

std::string matrix_digest(const Matrix& x) {
  // FNV-1a over the fbin byte image (header + row-major payload).
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&hash](const unsigned char* data, std::size_t size) {
    for (std::size_t i = 0; i < size; ++i) {
      hash ^= data[i];
      hash *= 1099511628211ull;
    }
  };
  mix(reinterpret_cast<const unsigned char*>(kMagic), 4);
  const std::uint64_t dims[2] = {static_cast<std::uint64_t>(x.rows()),
                                 static_cast<std::uint64_t>(x.cols())};
  mix(reinterpret_cast<const unsigned char*>(dims), sizeof(dims));
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) {
      const double v = x(i, j);
      mix(reinterpret_cast<const unsigned char*>(&v), sizeof(v));
    }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash;
  return out.str();
}

}  // namespace dollda
