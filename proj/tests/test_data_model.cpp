#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "dollda/config.hpp"
#include "dollda/dataset.hpp"
#include "dollda/labels.hpp"
#include "dollda/matrix_io.hpp"
#include "dollda/normalize.hpp"
#include "test_util.hpp"

using namespace dollda;
using test_util::random_matrix;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("embed_labels produces padded one-hot rows") {
  const EmbeddedLabels y = embed_labels({2}, 3, 5);
  REQUIRE(y.values.rows() == 1);
  REQUIRE(y.values.cols() == 5);
  Vector expected(5);
  expected << 0, 1, 0, 0, 0;
  CHECK((y.values.row(0).transpose() - expected).norm() == 0.0);
}

TEST_CASE("embed_labels degenerate single class") {
  const EmbeddedLabels y = embed_labels({1}, 1, 1);
  CHECK(y.values(0, 0) == 1.0);
}

TEST_CASE("embedded vectors of distinct classes are orthogonal") {
  const EmbeddedLabels y = embed_labels({1, 2}, 3, 5);
  CHECK(y.values.row(0).dot(y.values.row(1)) == 0.0);
}

TEST_CASE("embed_labels rejects k < C and bad labels") {
  CHECK_THROWS_AS(embed_labels({1}, 3, 2), ConfigError);
  CHECK_THROWS_AS(embed_labels({4}, 3, 5), DataError);
  CHECK_THROWS_AS(embed_labels({0}, 3, 5), DataError);
}

TEST_CASE("hard_labels argmax with lowest-index ties") {
  Matrix rows(2, 5);
  rows << 0.2, 0.5, 0.3, 0, 0,
          0.5, 0.5, 0.0, 0, 0;
  const LabelVector labels = hard_labels(rows, 3);
  CHECK(labels[0] == 2);
  CHECK(labels[1] == 1);
}

TEST_CASE("embed then hard_labels is the identity on label arrays") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int c = 1 + static_cast<int>(seed % 7);
    const int k = c + static_cast<int>(seed % 4);
    const LabelVector labels = test_util::random_labels(30, c, seed);
    const EmbeddedLabels y = embed_labels(labels, c, k);
    check_embedded_invariants(y);
    CHECK(hard_labels(y) == labels);
    for (Index i = 0; i < y.values.rows(); ++i)
      for (Index j = i + 1; j < y.values.rows(); ++j)
        if (labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)])
          CHECK(y.values.row(i).dot(y.values.row(j)) == 0.0);
  }
}

TEST_CASE("normalize none is the identity") {
  const Matrix x = random_matrix(4, 6, 7);
  CHECK((normalize(x, NormalizeMode::None) - x).norm() == 0.0);
}

TEST_CASE("zscore uses the population standard deviation") {
  Matrix x(1, 2);
  x << 1.0, 3.0;  // mean 2, population std 1
  const Matrix z = normalize(x, NormalizeMode::Zscore);
  CHECK(z(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(z(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("zscore leaves zero-variance rows centered only") {
  Matrix x(2, 3);
  x << 5.0, 5.0, 5.0,
       1.0, 2.0, 3.0;
  const Matrix z = normalize(x, NormalizeMode::Zscore);
  CHECK(z.row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.row(1).maxCoeff() > 0.0);
}

TEST_CASE("zscore_unit yields unit-norm nonzero columns") {
  const Matrix x = random_matrix(5, 8, 11);
  const Matrix z = normalize(x, NormalizeMode::ZscoreUnit);
  for (Index j = 0; j < z.cols(); ++j)
    CHECK(z.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stats-based normalize matches the in-place path and replays on new data") {
  const Matrix x = random_matrix(6, 10, 13);
  NormalizeStats stats;
  const Matrix a = normalize(x, NormalizeMode::ZscoreUnit, &stats);
  const Matrix b = normalize(x, NormalizeMode::ZscoreUnit);
  CHECK((a - b).norm() == 0.0);
  CHECK((apply_normalize(x, stats) - a).norm() == 0.0);
}

TEST_CASE("fbin round-trip is bit-exact") {
  const auto path = temp_file("dollda_test_roundtrip.fbin");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = random_matrix(3 + static_cast<Index>(seed % 5), 2 + static_cast<Index>(seed % 7), seed);
    save_matrix(x, path.string(), MatrixFormat::Fbin);
    const Matrix back = load_matrix(path.string(), MatrixFormat::Fbin);
    REQUIRE(back.rows() == x.rows());
    REQUIRE(back.cols() == x.cols());
    for (Index i = 0; i < x.rows(); ++i)
      for (Index j = 0; j < x.cols(); ++j)
        CHECK(std::memcmp(&back(i, j), &x(i, j), sizeof(double)) == 0);
  }
  std::filesystem::remove(path);
}

TEST_CASE("fbin identity example") {
  const auto path = temp_file("dollda_test_eye.fbin");
  const Matrix eye = Matrix::Identity(2, 2);
  save_matrix(eye, path.string(), MatrixFormat::Fbin);
  CHECK((load_matrix(path.string(), MatrixFormat::Fbin) - eye).norm() == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("csv parses rows and round-trips to relative precision") {
  const auto path = temp_file("dollda_test.csv");
  {
    std::ofstream out(path);
    out << "1.5,2.5\n3.5,4.5\n";
  }
  const Matrix x = load_matrix(path.string(), MatrixFormat::Csv);
  REQUIRE(x.rows() == 2);
  REQUIRE(x.cols() == 2);
  CHECK(x(0, 0) == 1.5);
  CHECK(x(0, 1) == 2.5);
  CHECK(x(1, 0) == 3.5);
  CHECK(x(1, 1) == 4.5);

  const Matrix noisy = random_matrix(4, 3, 99) * 1e8;
  save_matrix(noisy, path.string(), MatrixFormat::Csv);
  const Matrix back = load_matrix(path.string(), MatrixFormat::Csv);
  CHECK(((back - noisy).cwiseAbs().array() / noisy.cwiseAbs().array().max(1.0)).maxCoeff() <= 1e-15);
  std::filesystem::remove(path);
}

TEST_CASE("loader rejects non-finite entries with a position") {
  const auto path = temp_file("dollda_test_nan.csv");
  {
    std::ofstream out(path);
    out << "1.0,2.0\n3.0,nan\n";
  }
  try {
    load_matrix(path.string(), MatrixFormat::Csv);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("loader rejects malformed headers and dimension mismatches") {
  const auto path = temp_file("dollda_test_bad.fbin");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE";
  }
  CHECK_THROWS_AS(load_matrix(path.string(), MatrixFormat::Fbin), DataError);
  {
    std::ofstream out(path);
    out << "1.0,2.0\n3.0\n";
  }
  CHECK_THROWS_AS(load_matrix(path.string(), MatrixFormat::Csv), DataError);
  std::filesystem::remove(path);
}

TEST_CASE("label files round-trip") {
  const auto path = temp_file("dollda_test_labels.txt");
  const LabelVector labels = {3, 1, 2, 2, 1};
  save_labels(labels, path.string());
  CHECK(load_labels(path.string()) == labels);
  std::filesystem::remove(path);
}

TEST_CASE("dataset validation catches structural errors") {
  DaDataset ds;
  ds.x = random_matrix(4, 6, 3);
  ds.n_source = 3;
  ds.n_target = 3;
  ds.source_labels = {1, 2, 3};
  ds.class_count = 3;
  CHECK_NOTHROW(ds.validate());

  DaDataset missing_class = ds;
  missing_class.source_labels = {1, 2, 2};
  CHECK_THROWS_AS(missing_class.validate(), DataError);

  DaDataset bad_counts = ds;
  bad_counts.n_target = 4;
  CHECK_THROWS_AS(bad_counts.validate(), DataError);
}

TEST_CASE("matrix digest distinguishes contents") {
  const Matrix a = random_matrix(3, 3, 1);
  Matrix b = a;
  b(2, 2) += 1e-12;
  CHECK(matrix_digest(a) == matrix_digest(a));
  CHECK(matrix_digest(a) != matrix_digest(b));
}

TEST_CASE("solver config JSON round-trip") {
  SolverConfig cfg;
  cfg.k = 42;
  cfg.alpha = 0.25;
  cfg.beta = 3.0;
  cfg.outer_iters = 7;
  cfg.inner_iters = 4;
  cfg.gpi_tol = 1e-8;
  cfg.epsilon = 1e-5;
  cfg.centering_delta = 1e-7;
  cfg.variant = Variant::CDDA_PLUS;
  cfg.kernel = {KernelKind::Rbf, 2.5};
  cfg.init_labels = InitLabels::Random;
  cfg.init_seed = 99;
  cfg.normalize = NormalizeMode::Zscore;
  cfg.seed = 7;
  const SolverConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.k == cfg.k);
  CHECK(back.alpha == cfg.alpha);
  CHECK(back.beta == cfg.beta);
  CHECK(back.outer_iters == cfg.outer_iters);
  CHECK(back.inner_iters == cfg.inner_iters);
  CHECK(back.gpi_tol == cfg.gpi_tol);
  CHECK(back.epsilon == cfg.epsilon);
  CHECK(back.centering_delta == cfg.centering_delta);
  CHECK(back.variant == cfg.variant);
  CHECK(back.kernel.kind == cfg.kernel.kind);
  CHECK(back.kernel.bandwidth == cfg.kernel.bandwidth);
  CHECK(back.init_labels == cfg.init_labels);
  CHECK(back.init_seed == cfg.init_seed);
  CHECK(back.normalize == cfg.normalize);
  CHECK(back.seed == cfg.seed);
}

TEST_CASE("config parsing accepts partial objects and rejects junk") {
  const SolverConfig partial = config_from_json(R"({"variant": "OLR", "k": 9})");
  CHECK(partial.variant == Variant::OLR);
  CHECK(partial.k == 9);
  CHECK(partial.alpha == SolverConfig{}.alpha);  // untouched default
  CHECK_THROWS_AS(config_from_json("not json"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"variant": "NOPE"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"k": "many"})"), ConfigError);

  SolverConfig bad;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
