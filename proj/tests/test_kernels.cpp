#include <doctest.h>

#include "dollda/kernels.hpp"
#include "test_util.hpp"

using namespace dollda;
using test_util::random_matrix;

// The OpenMP kernels assign whole output elements to single threads with a
// fixed inner order, so they must agree bit-for-bit with the serial twins.

TEST_CASE("pairwise_sqdist matches the serial reference bitwise") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix a = random_matrix(7, 23, seed);
    const Matrix b = random_matrix(7, 31, seed + 100);
    Matrix parallel, serial;
    kernels::pairwise_sqdist(a, b, parallel);
    kernels::reference::pairwise_sqdist(a, b, serial);
    CHECK((parallel - serial).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("pairwise_sqdist values against a direct loop") {
  const Matrix a = random_matrix(4, 6, 1);
  const Matrix b = random_matrix(4, 5, 2);
  Matrix d;
  kernels::pairwise_sqdist(a, b, d);
  for (Index i = 0; i < a.cols(); ++i)
    for (Index j = 0; j < b.cols(); ++j)
      CHECK(d(i, j) == doctest::Approx((a.col(i) - b.col(j)).squaredNorm()).epsilon(1e-14));
  CHECK_THROWS_AS(kernels::pairwise_sqdist(random_matrix(3, 2, 0), random_matrix(4, 2, 0), d),
                  DataError);
}

TEST_CASE("weighted_gram_accumulate matches serial twin and dense algebra") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix v = random_matrix(17, 9, seed);
    Vector signs(9);
    for (Index t = 0; t < 9; ++t) signs(t) = (t % 2 == 0) ? 1.0 : -1.0;
    Matrix parallel, serial;
    kernels::weighted_gram_accumulate(v, signs, parallel);
    kernels::reference::weighted_gram_accumulate(v, signs, serial);
    CHECK((parallel - serial).cwiseAbs().maxCoeff() == 0.0);
    const Matrix dense = v * signs.asDiagonal() * v.transpose();
    CHECK((parallel - dense).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("zscore_rows matches serial twin") {
  const Matrix base = random_matrix(13, 29, 3);
  Matrix parallel = base, serial = base;
  kernels::zscore_rows(parallel);
  kernels::reference::zscore_rows(serial);
  CHECK((parallel - serial).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("simplex_project_rows matches serial twin") {
  const Matrix base = random_matrix(40, 8, 4) * 2.0;
  Matrix parallel = base, serial = base;
  kernels::simplex_project_rows(parallel, 5);
  kernels::reference::simplex_project_rows(serial, 5);
  CHECK((parallel - serial).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("project_to_simplex produces valid simplex points") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Vector v = random_matrix(6, 1, seed).col(0) * 3.0;
    const Vector p = kernels::project_to_simplex(v);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}
