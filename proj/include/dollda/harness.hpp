#ifndef DOLLDA_HARNESS_HPP
#define DOLLDA_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dollda/config.hpp"
#include "dollda/dataset.hpp"
#include "dollda/pipeline.hpp"
#include "dollda/types.hpp"

namespace dollda {

/// 1-nearest-neighbor with Euclidean distance; ties go to the lowest training index.
LabelVector nn_classify(const Matrix& train_x, const LabelVector& train_labels,
                        const Matrix& test_x);

/// Fraction of matching labels, exact ratio.
double accuracy(const LabelVector& predicted, const LabelVector& truth);

struct SyntheticTask {
  DaDataset dataset;
  LabelVector target_truth;  // evaluation only, never fed to fit
};

/// Gaussian blobs at axis-aligned class centers; the target domain is the same
/// blobs rotated by rotation_degrees in a seed-chosen 2-plane plus isotropic
/// noise. Deterministic per seed.
SyntheticTask make_synthetic(std::uint64_t seed, int n_per_class, int class_count, int dim,
                             double rotation_degrees, double noise_sigma);

struct TaskReport {
  std::string task_name;
  Variant variant = Variant::DOLL_DA;
  bool failed = false;
  std::string error;
  double accuracy = 0.0;
  std::vector<double> per_iteration_accuracy;
  double wall_time_seconds = 0.0;
  SolverConfig config_echo;
  std::uint64_t seed = 0;
  std::string dataset_digest;
  FitResult fit;  // retained for inspection; not part of the JSON report
};

/// Runs fit (or fit_kernel) and scores each outer iteration's target labels.
TaskReport run_task(const std::string& name, const DaDataset& dataset, const SolverConfig& config,
                    const LabelVector& truth_labels_target);

struct SuiteTask {
  std::string name;
  std::string source_features;
  std::string source_labels;
  std::string target_features;
  std::string target_truth_labels;  // optional, empty when absent
  SolverConfig config;
};

struct SuiteResult {
  std::vector<TaskReport> reports;  // manifest order
  std::vector<std::pair<std::string, double>> per_variant_mean;  // variant name -> mean accuracy
};

std::vector<SuiteTask> load_manifest(const std::string& manifest_path);

/// Executes tasks (jobs > 1 runs them in parallel, results gathered in manifest
/// order); missing files fail the task and the suite continues.
SuiteResult run_suite(const std::string& manifest_path, int jobs = 1);

/// Report writers: JSON array of reports, CSV summary (task,variant,accuracy),
/// and optionally one per-iteration accuracy CSV per task.
void write_suite_reports(const SuiteResult& suite, const std::string& out_dir,
                         bool emit_convergence);

std::string report_to_json(const TaskReport& report);

}  // namespace dollda

#endif  // DOLLDA_HARNESS_HPP
