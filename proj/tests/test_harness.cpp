#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dollda/harness.hpp"
#include "dollda/matrix_io.hpp"
#include "test_util.hpp"

using namespace dollda;
using test_util::random_matrix;

TEST_CASE("nn_classify exact hit and tie rule") {
  Matrix train(1, 2);
  train << 0.0, 2.0;
  const LabelVector labels = {2, 1};

  Matrix hit(1, 1);
  hit << 2.0;
  CHECK(nn_classify(train, labels, hit) == LabelVector{1});

  Matrix midpoint(1, 1);
  midpoint << 1.0;  // equidistant, lowest training index wins
  CHECK(nn_classify(train, labels, midpoint) == LabelVector{2});
}

TEST_CASE("nn_classify agrees with a brute-force double loop") {
  const Matrix train = random_matrix(6, 50, 1);
  const Matrix test = random_matrix(6, 37, 2);
  const LabelVector labels = test_util::random_labels(50, 4, 3);
  const LabelVector fast = nn_classify(train, labels, test);
  for (Index j = 0; j < test.cols(); ++j) {
    Index best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < train.cols(); ++i) {
      double d = 0.0;
      for (Index f = 0; f < train.rows(); ++f) {
        const double diff = train(f, i) - test(f, j);
        d += diff * diff;
      }
      if (d < best_dist) {
        best_dist = d;
        best = i;
      }
    }
    CHECK(fast[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(best)]);
  }
}

TEST_CASE("nn_classify rejects bad shapes") {
  CHECK_THROWS_AS(nn_classify(random_matrix(3, 4, 0), {1, 2, 1, 2}, random_matrix(4, 2, 1)),
                  DataError);
  CHECK_THROWS_AS(nn_classify(random_matrix(3, 4, 0), {1, 2}, random_matrix(3, 2, 1)), DataError);
}

TEST_CASE("accuracy is the exact ratio") {
  CHECK(accuracy({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(accuracy({1, 2, 3, 1}, {1, 2, 2, 2}) == 0.5);
  CHECK(accuracy({1, 1, 2, 2}, {1, 1, 2, 1}) == 0.75);
  CHECK_THROWS_AS(accuracy({1}, {1, 2}), DataError);
}

TEST_CASE("make_synthetic determinism and the identical-domain case") {
  const SyntheticTask a = make_synthetic(42, 10, 3, 8, 30.0, 0.5);
  const SyntheticTask b = make_synthetic(42, 10, 3, 8, 30.0, 0.5);
  CHECK((a.dataset.x - b.dataset.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.dataset.source_labels == b.dataset.source_labels);
  CHECK(a.target_truth == b.target_truth);
  a.dataset.validate();

  const SyntheticTask same = make_synthetic(7, 15, 3, 10, 0.0, 0.0);
  const LabelVector pred = nn_classify(same.dataset.source_block(), same.dataset.source_labels,
                                       same.dataset.target_block());
  CHECK(accuracy(pred, same.target_truth) == 1.0);
}

TEST_CASE("rotation with moderate noise drags the NN baseline below one") {
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SyntheticTask task = make_synthetic(seed, 30, 3, 20, 30.0, 0.5);
    const LabelVector pred = nn_classify(task.dataset.source_block(), task.dataset.source_labels,
                                         task.dataset.target_block());
    mean += accuracy(pred, task.target_truth);
  }
  CHECK(mean / 5.0 < 1.0);
}

TEST_CASE("make_synthetic rejects bad parameters") {
  CHECK_THROWS_AS(make_synthetic(0, 10, 1, 5, 0.0, 0.1), ConfigError);
  CHECK_THROWS_AS(make_synthetic(0, 10, 2, 1, 0.0, 0.1), ConfigError);
  CHECK_THROWS_AS(make_synthetic(0, 0, 2, 5, 0.0, 0.1), ConfigError);
}

TEST_CASE("run_task reports accuracy per iteration and a dataset digest") {
  const SyntheticTask task = make_synthetic(11, 15, 3, 10, 25.0, 0.4);
  SolverConfig cfg;
  cfg.variant = Variant::DOLL_DA;
  cfg.k = 3;
  cfg.beta = 2.0;
  const TaskReport report = run_task("demo", task.dataset, cfg, task.target_truth);
  REQUIRE(!report.failed);
  CHECK(report.task_name == "demo");
  REQUIRE(!report.per_iteration_accuracy.empty());
  CHECK(report.per_iteration_accuracy.size() ==
        static_cast<std::size_t>(report.fit.iterations_run));
  CHECK(report.per_iteration_accuracy.back() == report.accuracy);
  CHECK(report.dataset_digest == matrix_digest(task.dataset.x));
  CHECK(report.wall_time_seconds >= 0.0);

  SolverConfig other = cfg;
  other.variant = Variant::JDA;
  const TaskReport second = run_task("demo2", task.dataset, other, task.target_truth);
  CHECK(second.dataset_digest == report.dataset_digest);
}

TEST_CASE("run_task captures fit errors as failed reports") {
  const SyntheticTask task = make_synthetic(12, 10, 3, 8, 25.0, 0.4);
  SolverConfig cfg;
  cfg.k = 2;  // below the class count
  const TaskReport report = run_task("broken", task.dataset, cfg, task.target_truth);
  CHECK(report.failed);
  CHECK(!report.error.empty());
}

namespace {

std::filesystem::path write_suite_fixture(bool break_one) {
  const auto dir = std::filesystem::temp_directory_path() / "dollda_test_suite";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const SyntheticTask task = make_synthetic(21, 12, 3, 10, 30.0, 0.5);
  save_matrix(task.dataset.source_block(), (dir / "sx.fbin").string(), MatrixFormat::Fbin);
  save_matrix(task.dataset.target_block(), (dir / "tx.fbin").string(), MatrixFormat::Fbin);
  save_labels(task.dataset.source_labels, (dir / "sy.txt").string());
  save_labels(task.target_truth, (dir / "ty.txt").string());
  std::ofstream manifest(dir / "manifest.json");
  manifest << R"([
    {"name": "doll", "source_features": ")" << (dir / "sx.fbin").string() << R"(",
     "source_labels": ")" << (dir / "sy.txt").string() << R"(",
     "target_features": ")" << (dir / "tx.fbin").string() << R"(",
     "target_truth_labels": ")" << (dir / "ty.txt").string() << R"(",
     "config": {"variant": "DOLL_DA", "k": 3, "beta": 2.0}},
    {"name": "jda", "source_features": ")" << (dir / "sx.fbin").string() << R"(",
     "source_labels": ")" << (dir / "sy.txt").string() << R"(",
     "target_features": ")" << (dir / (break_one ? "missing.fbin" : "tx.fbin")).string() << R"(",
     "target_truth_labels": ")" << (dir / "ty.txt").string() << R"(",
     "config": {"variant": "JDA", "k": 3}}
  ])";
  return dir;
}

}  // namespace

TEST_CASE("run_suite executes tasks in manifest order and summarizes per variant") {
  const auto dir = write_suite_fixture(false);
  const SuiteResult suite = run_suite((dir / "manifest.json").string(), 2);
  REQUIRE(suite.reports.size() == 2);
  CHECK(suite.reports[0].task_name == "doll");
  CHECK(suite.reports[1].task_name == "jda");
  CHECK(!suite.reports[0].failed);
  CHECK(!suite.reports[1].failed);
  REQUIRE(suite.per_variant_mean.size() == 2);
  for (const auto& [variant, mean] : suite.per_variant_mean) {
    CHECK(mean >= 0.0);
    CHECK(mean <= 1.0);
  }

  write_suite_reports(suite, (dir / "out").string(), true);
  CHECK(std::filesystem::exists(dir / "out" / "report.json"));
  CHECK(std::filesystem::exists(dir / "out" / "summary.csv"));
  CHECK(std::filesystem::exists(dir / "out" / "convergence_doll.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("run_suite keeps going past missing files") {
  const auto dir = write_suite_fixture(true);
  const SuiteResult suite = run_suite((dir / "manifest.json").string(), 1);
  REQUIRE(suite.reports.size() == 2);
  CHECK(!suite.reports[0].failed);
  CHECK(suite.reports[1].failed);
  std::filesystem::remove_all(dir);
}

TEST_CASE("reports are deterministic given seed and config") {
  const SyntheticTask task = make_synthetic(31, 12, 3, 10, 30.0, 0.5);
  SolverConfig cfg;
  cfg.variant = Variant::DOLL_DA;
  cfg.k = 3;
  cfg.beta = 2.0;
  const TaskReport a = run_task("det", task.dataset, cfg, task.target_truth);
  const TaskReport b = run_task("det", task.dataset, cfg, task.target_truth);
  CHECK(a.accuracy == b.accuracy);
  CHECK(a.per_iteration_accuracy == b.per_iteration_accuracy);
  CHECK(a.dataset_digest == b.dataset_digest);
}

TEST_CASE("the dataset type carries no target truth labels") {
  // fit consumes only DaDataset and SolverConfig; truth labels live in
  // SyntheticTask and the harness, so leaking them into fit cannot typecheck.
  const SyntheticTask task = make_synthetic(1, 5, 2, 4, 10.0, 0.1);
  CHECK(task.dataset.source_labels.size() == static_cast<std::size_t>(task.dataset.n_source));
}

TEST_CASE("an empty manifest yields an empty report and succeeds") {
  const auto dir = std::filesystem::temp_directory_path() / "dollda_test_empty_manifest";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "manifest.json");
    out << "[]";
  }
  const SuiteResult suite = run_suite((dir / "manifest.json").string(), 1);
  CHECK(suite.reports.empty());
  CHECK(suite.per_variant_mean.empty());
  std::filesystem::remove_all(dir);
}

TEST_CASE("per-variant means are the arithmetic mean of task accuracies") {
  const auto dir = std::filesystem::temp_directory_path() / "dollda_test_means";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  // two tasks with the same variant but different seeds
  for (int which = 0; which < 2; ++which) {
    const SyntheticTask task = make_synthetic(60 + which, 10, 3, 10, 30.0, 0.8);
    const std::string tag = std::to_string(which);
    save_matrix(task.dataset.source_block(), (dir / ("sx" + tag + ".fbin")).string(),
                MatrixFormat::Fbin);
    save_matrix(task.dataset.target_block(), (dir / ("tx" + tag + ".fbin")).string(),
                MatrixFormat::Fbin);
    save_labels(task.dataset.source_labels, (dir / ("sy" + tag + ".txt")).string());
    save_labels(task.target_truth, (dir / ("ty" + tag + ".txt")).string());
  }
  {
    std::ofstream out(dir / "manifest.json");
    out << "[";
    for (int which = 0; which < 2; ++which) {
      const std::string tag = std::to_string(which);
      if (which) out << ",";
      out << "{\"name\": \"t" << tag << "\","
          << "\"source_features\": \"" << (dir / ("sx" + tag + ".fbin")).string() << "\","
          << "\"source_labels\": \"" << (dir / ("sy" + tag + ".txt")).string() << "\","
          << "\"target_features\": \"" << (dir / ("tx" + tag + ".fbin")).string() << "\","
          << "\"target_truth_labels\": \"" << (dir / ("ty" + tag + ".txt")).string() << "\","
          << "\"config\": {\"variant\": \"DOLL_DA\", \"k\": 3, \"beta\": 2.0}}";
    }
    out << "]";
  }
  const SuiteResult suite = run_suite((dir / "manifest.json").string(), 1);
  REQUIRE(suite.reports.size() == 2);
  REQUIRE(suite.per_variant_mean.size() == 1);
  CHECK(suite.per_variant_mean[0].first == "DOLL_DA");
  CHECK(suite.per_variant_mean[0].second ==
        doctest::Approx(0.5 * (suite.reports[0].accuracy + suite.reports[1].accuracy))
            .epsilon(1e-15));
  std::filesystem::remove_all(dir);
}
