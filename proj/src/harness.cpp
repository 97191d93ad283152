#include "dollda/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "dollda/kernels.hpp"
#include "dollda/matrix_io.hpp"

namespace dollda {

LabelVector nn_classify(const Matrix& train_x, const LabelVector& train_labels,
                        const Matrix& test_x) {
  if (train_x.cols() < 1) throw DataError("nn_classify: empty training set");
  if (static_cast<Index>(train_labels.size()) != train_x.cols())
    throw DataError("nn_classify: label count does not match training samples");
  if (train_x.rows() != test_x.rows())
    throw DataError("nn_classify: feature dimensions differ (" + std::to_string(train_x.rows()) +
                    " vs " + std::to_string(test_x.rows()) + ")");
  Matrix d;
  kernels::pairwise_sqdist(train_x, test_x, d);
  LabelVector out(static_cast<std::size_t>(test_x.cols()));
  for (Index j = 0; j < d.cols(); ++j) {
    Index best = 0;
    for (Index i = 1; i < d.rows(); ++i)
      if (d(i, j) < d(best, j)) best = i;  // strict: ties keep the lowest index
    out[static_cast<std::size_t>(j)] = train_labels[static_cast<std::size_t>(best)];
  }
  return out;
}

double accuracy(const LabelVector& predicted, const LabelVector& truth) {
  if (predicted.size() != truth.size())
    throw DataError("accuracy: prediction and truth lengths differ");
  if (predicted.empty()) throw DataError("accuracy: empty label vectors");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == truth[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

namespace {

// Box-Muller over explicit 53-bit uniforms, so streams do not depend on the
// standard library's distribution implementations.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

SyntheticTask make_synthetic(std::uint64_t seed, int n_per_class, int class_count, int dim,
                             double rotation_degrees, double noise_sigma) {
  if (class_count < 2) throw ConfigError("make_synthetic: class_count must be >= 2");
  if (dim < 2) throw ConfigError("make_synthetic: dim must be >= 2");
  if (n_per_class < 1) throw ConfigError("make_synthetic: n_per_class must be >= 1");
  if (noise_sigma < 0.0) throw ConfigError("make_synthetic: noise_sigma must be >= 0");

  constexpr double kSeparation = 6.0;
  constexpr double kCommonOffset = 24.0;
  const Index n_side = static_cast<Index>(n_per_class) * class_count;
  GaussianStream gauss(seed);

  // Rotation plane: the first direction carries a large common offset shared
  // by every class center, so rotating tilts the whole target cloud (the kind
  // of systematic shift a nearest-neighbor baseline cannot absorb) while the
  // class contrasts orthogonal to the plane survive for a projection to find.
  const int span = std::min(class_count, dim);
  Vector u = Vector::Zero(dim);
  for (int c = 0; c < span; ++c) u(c) = gauss();
  u.normalize();
  Vector v(dim);
  do {
    for (Index f = 0; f < dim; ++f) v(f) = gauss();
    v -= u * u.dot(v);
  } while (v.norm() < 1e-8);
  v.normalize();

  // Fresh draws per domain; with zero rotation and noise the target block is
  // an exact copy of the source so the domains are identical by construction.
  Matrix source(dim, n_side);
  Matrix target_base(dim, n_side);
  LabelVector labels(static_cast<std::size_t>(n_side));
  auto fill_domain = [&](Matrix& block) {
    for (int c = 0; c < class_count; ++c) {
      const Index axis = static_cast<Index>(c % dim);
      for (int s = 0; s < n_per_class; ++s) {
        const Index col = static_cast<Index>(c) * n_per_class + s;
        for (Index f = 0; f < dim; ++f) block(f, col) = kCommonOffset * u(f) + gauss();
        block(axis, col) += kSeparation;
      }
    }
  };
  fill_domain(source);
  for (int c = 0; c < class_count; ++c)
    for (int s = 0; s < n_per_class; ++s)
      labels[static_cast<std::size_t>(c * n_per_class + s)] = c + 1;
  const bool identity_shift = rotation_degrees == 0.0 && noise_sigma == 0.0;
  if (identity_shift)
    target_base = source;
  else
    fill_domain(target_base);

  const double theta = rotation_degrees * M_PI / 180.0;
  Matrix rotation = Matrix::Identity(dim, dim);
  rotation += (std::cos(theta) - 1.0) * (u * u.transpose() + v * v.transpose());
  rotation += std::sin(theta) * (u * v.transpose() - v * u.transpose());

  Matrix target = rotation * target_base;
  if (noise_sigma > 0.0)
    for (Index j = 0; j < target.cols(); ++j)
      for (Index f = 0; f < dim; ++f) target(f, j) += noise_sigma * gauss();

  SyntheticTask task;
  task.dataset.x.resize(dim, 2 * n_side);
  task.dataset.x << source, target;
  task.dataset.n_source = n_side;
  task.dataset.n_target = n_side;
  task.dataset.source_labels = labels;
  task.dataset.class_count = class_count;
  task.target_truth = labels;
  return task;
}

TaskReport run_task(const std::string& name, const DaDataset& dataset, const SolverConfig& config,
                    const LabelVector& truth_labels_target) {
  TaskReport report;
  report.task_name = name;
  report.variant = config.variant;
  report.config_echo = config;
  report.seed = config.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    report.dataset_digest = matrix_digest(dataset.x);
    report.fit = config.kernel.kind == KernelKind::None ? fit(dataset, config)
                                                        : fit_kernel(dataset, config);
    if (!truth_labels_target.empty()) {
      report.accuracy = accuracy(report.fit.target_labels, truth_labels_target);
      for (const auto& labels : report.fit.diagnostics.label_history)
        report.per_iteration_accuracy.push_back(accuracy(labels, truth_labels_target));
    }
  } catch (const std::exception& e) {
    report.failed = true;
    report.error = e.what();
  }
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<SuiteTask> load_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw ConfigError("cannot open manifest '" + manifest_path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw ConfigError("manifest must be a JSON array of tasks");
  std::vector<SuiteTask> tasks;
  for (const auto& entry : j) {
    SuiteTask task;
    try {
      task.name = entry.at("name").get<std::string>();
      task.source_features = entry.at("source_features").get<std::string>();
      task.source_labels = entry.at("source_labels").get<std::string>();
      task.target_features = entry.at("target_features").get<std::string>();
      if (entry.contains("target_truth_labels"))
        task.target_truth_labels = entry.at("target_truth_labels").get<std::string>();
      if (entry.contains("config")) task.config = config_from_json(entry.at("config").dump());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad manifest entry: ") + e.what());
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

namespace {

TaskReport run_suite_task(const SuiteTask& task) {
  try {
    const Matrix source = load_matrix(task.source_features);
    const Matrix target = load_matrix(task.target_features);
    const LabelVector source_labels = load_labels(task.source_labels);
    LabelVector truth;
    if (!task.target_truth_labels.empty()) truth = load_labels(task.target_truth_labels);

    if (source.rows() != target.rows())
      throw DataError("task '" + task.name + "': source/target feature dimensions differ");
    DaDataset dataset;
    dataset.x.resize(source.rows(), source.cols() + target.cols());
    dataset.x << source, target;
    dataset.n_source = source.cols();
    dataset.n_target = target.cols();
    dataset.source_labels = source_labels;
    dataset.class_count = 0;
    for (int label : source_labels) dataset.class_count = std::max(dataset.class_count, label);
    dataset.validate();
    if (!truth.empty() && static_cast<Index>(truth.size()) != dataset.n_target)
      throw DataError("task '" + task.name + "': truth label count mismatch");
    return run_task(task.name, dataset, task.config, truth);
  } catch (const std::exception& e) {
    TaskReport report;
    report.task_name = task.name;
    report.variant = task.config.variant;
    report.config_echo = task.config;
    report.seed = task.config.seed;
    report.failed = true;
    report.error = e.what();
    return report;
  }
}

}  // namespace

SuiteResult run_suite(const std::string& manifest_path, int jobs) {
  const std::vector<SuiteTask> tasks = load_manifest(manifest_path);
  SuiteResult suite;
  suite.reports.resize(tasks.size());

  if (jobs < 1) jobs = 1;
  if (tasks.size() < static_cast<std::size_t>(jobs)) jobs = static_cast<int>(tasks.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) suite.reports[i] = run_suite_task(tasks[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
          suite.reports[i] = run_suite_task(tasks[i]);
      });
    for (auto& worker : workers) worker.join();
  }

  // Per-variant mean accuracy over the scored, successful tasks.
  std::vector<std::pair<std::string, std::pair<double, int>>> sums;
  for (const auto& report : suite.reports) {
    if (report.failed || report.per_iteration_accuracy.empty()) continue;
    const std::string key = to_string(report.variant);
    auto it = std::find_if(sums.begin(), sums.end(), [&](const auto& s) { return s.first == key; });
    if (it == sums.end()) it = sums.insert(sums.end(), {key, {0.0, 0}});
    it->second.first += report.accuracy;
    it->second.second += 1;
  }
  for (const auto& [key, acc] : sums)
    suite.per_variant_mean.emplace_back(key, acc.first / static_cast<double>(acc.second));
  return suite;
}

std::string report_to_json(const TaskReport& report) {
  nlohmann::json j;
  j["task_name"] = report.task_name;
  j["variant"] = to_string(report.variant);
  j["failed"] = report.failed;
  if (report.failed) j["error"] = report.error;
  j["accuracy"] = report.accuracy;
  j["per_iteration_accuracy"] = report.per_iteration_accuracy;
  j["wall_time_seconds"] = report.wall_time_seconds;
  j["config_echo"] = nlohmann::json::parse(config_to_json(report.config_echo));
  j["seed"] = report.seed;
  j["dataset_digest"] = report.dataset_digest;
  return j.dump(2);
}

void write_suite_reports(const SuiteResult& suite, const std::string& out_dir,
                         bool emit_convergence) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  {
    nlohmann::json all = nlohmann::json::array();
    for (const auto& report : suite.reports)
      all.push_back(nlohmann::json::parse(report_to_json(report)));
    std::ofstream out(dir / "report.json", std::ios::trunc);
    if (!out) throw DataError("cannot write suite report");
    out << all.dump(2) << '\n';
  }

  {
    std::ofstream out(dir / "summary.csv", std::ios::trunc);
    if (!out) throw DataError("cannot write suite summary");
    out << "task,variant,accuracy\n";
    out.precision(17);
    for (const auto& report : suite.reports) {
      out << report.task_name << ',' << to_string(report.variant) << ',';
      if (report.failed)
        out << "failed";
      else
        out << report.accuracy;
      out << '\n';
    }
    for (const auto& [variant, mean] : suite.per_variant_mean)
      out << "mean," << variant << ',' << mean << '\n';
  }

  if (emit_convergence) {
    for (const auto& report : suite.reports) {
      if (report.failed) continue;
      std::ofstream out(dir / ("convergence_" + report.task_name + ".csv"), std::ios::trunc);
      if (!out) throw DataError("cannot write convergence trace");
      out << "iteration,accuracy\n";
      out.precision(17);
      for (std::size_t i = 0; i < report.per_iteration_accuracy.size(); ++i)
        out << (i + 1) << ',' << report.per_iteration_accuracy[i] << '\n';
    }
  }
}

}  // namespace dollda
