// Times the OpenMP kernels against their serial reference twins.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dollda/kernels.hpp"

using dollda::Index;
using dollda::Matrix;
using dollda::Vector;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      m(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
  return m;
}

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed < best) best = elapsed;
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s %10.4f ms %10.4f ms %7.2fx\n", name, serial * 1e3, parallel * 1e3,
              serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif
  std::printf("%-28s %13s %13s %8s\n", "kernel", "serial", "parallel", "speedup");

  const int reps = 5;
  {
    const Matrix a = random_matrix(256, 1200, 1);
    const Matrix b = random_matrix(256, 1200, 2);
    Matrix out;
    const double serial =
        time_best_of(reps, [&] { dollda::kernels::reference::pairwise_sqdist(a, b, out); });
    const double parallel =
        time_best_of(reps, [&] { dollda::kernels::pairwise_sqdist(a, b, out); });
    report("pairwise_sqdist 256x1200", serial, parallel);
  }
  {
    const Matrix components = random_matrix(1200, 64, 3);
    const Vector signs = Vector::Ones(64);
    Matrix out;
    const double serial = time_best_of(
        reps, [&] { dollda::kernels::reference::weighted_gram_accumulate(components, signs, out); });
    const double parallel =
        time_best_of(reps, [&] { dollda::kernels::weighted_gram_accumulate(components, signs, out); });
    report("gram_accumulate 1200x64", serial, parallel);
  }
  {
    const Matrix base = random_matrix(2048, 4096, 4);
    Matrix x;
    const double serial = time_best_of(reps, [&] {
      x = base;
      dollda::kernels::reference::zscore_rows(x);
    });
    const double parallel = time_best_of(reps, [&] {
      x = base;
      dollda::kernels::zscore_rows(x);
    });
    report("zscore_rows 2048x4096", serial, parallel);
  }
  {
    const Matrix base = random_matrix(20000, 64, 5);
    Matrix y;
    const double serial = time_best_of(reps, [&] {
      y = base;
      dollda::kernels::reference::simplex_project_rows(y, 32);
    });
    const double parallel = time_best_of(reps, [&] {
      y = base;
      dollda::kernels::simplex_project_rows(y, 32);
    });
    report("simplex_rows 20000x64", serial, parallel);
  }
  return 0;
}
