// Command-line front end: fit a domain-adaptation model, predict with a saved
// model, run benchmark manifests, and generate synthetic tasks.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "dollda/harness.hpp"
#include "dollda/kernels.hpp"
#include "dollda/matrix_io.hpp"
#include "dollda/normalize.hpp"
#include "dollda/pipeline.hpp"

namespace fs = std::filesystem;
using namespace dollda;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> variant;
  std::optional<int> k;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<int> iters;
  std::optional<std::string> kernel;
  std::optional<double> bandwidth;
  std::optional<std::string> init_labels;
  std::optional<std::string> normalize_mode;
};

void add_config_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file (flags override its values)");
  cmd->add_option("--variant", flags.variant, "JDA, OLR, CDDA_PLUS, JOLR_DA or DOLL_DA");
  cmd->add_option("--k", flags.k, "subspace dimension");
  cmd->add_option("--alpha", flags.alpha, "ridge weight");
  cmd->add_option("--beta", flags.beta, "row-sparsity weight");
  cmd->add_option("--iters", flags.iters, "outer iterations T");
  cmd->add_option("--kernel", flags.kernel, "none, linear or rbf");
  cmd->add_option("--bandwidth", flags.bandwidth, "rbf bandwidth (omit for the median heuristic)");
  cmd->add_option("--init-labels", flags.init_labels, "nn or random:SEED");
  cmd->add_option("--normalize", flags.normalize_mode, "none, zscore or zscore-unit");
}

SolverConfig resolve_config(const CommonFlags& flags) {
  SolverConfig cfg;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw ConfigError("cannot open config file '" + flags.config_path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    cfg = config_from_json(text);
  }
  if (flags.variant) cfg.variant = variant_from_string(*flags.variant);
  if (flags.k) cfg.k = *flags.k;
  if (flags.alpha) cfg.alpha = *flags.alpha;
  if (flags.beta) cfg.beta = *flags.beta;
  if (flags.iters) cfg.outer_iters = *flags.iters;
  if (flags.kernel) cfg.kernel.kind = kernel_kind_from_string(*flags.kernel);
  if (flags.bandwidth) {
    if (*flags.bandwidth <= 0.0) throw ConfigError("--bandwidth must be > 0");
    cfg.kernel.bandwidth = *flags.bandwidth;
  }
  if (flags.init_labels) {
    const std::string& s = *flags.init_labels;
    if (s == "nn" || s == "nearest_neighbor") {
      cfg.init_labels = InitLabels::NearestNeighbor;
    } else if (s.rfind("random", 0) == 0) {
      cfg.init_labels = InitLabels::Random;
      const auto colon = s.find(':');
      if (colon != std::string::npos) {
        try {
          cfg.init_seed = std::stoull(s.substr(colon + 1));
        } catch (const std::exception&) {
          throw ConfigError("bad --init-labels seed in '" + s + "'");
        }
      }
    } else {
      throw ConfigError("--init-labels must be nn or random:SEED, got '" + s + "'");
    }
  }
  if (flags.normalize_mode) cfg.normalize = normalize_from_string(*flags.normalize_mode);
  cfg.validate();
  return cfg;
}

DaDataset build_dataset(const std::string& source_x, const std::string& source_y,
                        const std::string& target_x) {
  const Matrix source = load_matrix(source_x);
  const Matrix target = load_matrix(target_x);
  const LabelVector labels = load_labels(source_y);
  if (source.rows() != target.rows())
    throw DataError("source has " + std::to_string(source.rows()) + " features but target has " +
                    std::to_string(target.rows()));
  DaDataset ds;
  ds.x.resize(source.rows(), source.cols() + target.cols());
  ds.x << source, target;
  ds.n_source = source.cols();
  ds.n_target = target.cols();
  ds.source_labels = labels;
  ds.class_count = 0;
  for (int label : labels) ds.class_count = std::max(ds.class_count, label);
  ds.validate();
  return ds;
}

// Side files beyond the FitResult so `predict` can score held-out samples:
// normalization statistics, the projected source data, and in kernel mode the
// training inputs the Gram rows are evaluated against.
void save_model_extras(const fs::path& dir, const DaDataset& ds, const SolverConfig& cfg,
                       const FitResult& result) {
  NormalizeStats stats;
  const Matrix x_norm = normalize(ds.x, cfg.normalize, &stats);
  nlohmann::json j;
  j["variant"] = to_string(cfg.variant);
  j["kernel"] = {{"kind", to_string(cfg.kernel.kind)}, {"bandwidth", cfg.kernel.bandwidth}};
  j["class_count"] = ds.class_count;
  j["n_source"] = static_cast<std::int64_t>(ds.n_source);
  j["normalize"] = to_string(cfg.normalize);
  if (cfg.normalize != NormalizeMode::None) {
    save_matrix(stats.mean, (dir / "norm_mean.fbin").string(), MatrixFormat::Fbin);
    save_matrix(stats.std, (dir / "norm_std.fbin").string(), MatrixFormat::Fbin);
  }
  save_labels(ds.source_labels, (dir / "source_labels.txt").string());
  if (cfg.kernel.kind == KernelKind::None) {
    const Matrix zs = result.a.transpose() * x_norm.leftCols(ds.n_source);
    save_matrix(zs, (dir / "source_projected.fbin").string(), MatrixFormat::Fbin);
  } else {
    const Matrix gram = kernel_gram(x_norm, cfg.kernel);
    const Matrix zs = result.a.transpose() * gram.leftCols(ds.n_source);
    save_matrix(zs, (dir / "source_projected.fbin").string(), MatrixFormat::Fbin);
    save_matrix(x_norm, (dir / "train_inputs.fbin").string(), MatrixFormat::Fbin);
  }
  std::ofstream out(dir / "model.json", std::ios::trunc);
  if (!out) throw DataError("cannot write model.json");
  out << j.dump(2) << '\n';
}

int cmd_fit(const std::string& source_x, const std::string& source_y, const std::string& target_x,
            const std::string& out_dir, const CommonFlags& flags) {
  const SolverConfig cfg = resolve_config(flags);
  const DaDataset ds = build_dataset(source_x, source_y, target_x);
  const FitResult result =
      cfg.kernel.kind == KernelKind::None ? fit(ds, cfg) : fit_kernel(ds, cfg);
  fs::create_directories(out_dir);
  save_fit_result(result, out_dir);
  save_model_extras(fs::path(out_dir), ds, cfg, result);
  std::cout << "objective " << result.objective_trace.back() << " after " << result.iterations_run
            << " iterations\n";
  return 0;
}

int cmd_predict(const std::string& model_dir, const std::string& target_x,
                const std::string& out_path, const std::string& truth_path) {
  const fs::path dir(model_dir);
  std::ifstream in(dir / "model.json");
  if (!in) throw DataError("cannot open '" + (dir / "model.json").string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad model.json: ") + e.what());
  }
  const Variant variant = variant_from_string(j.at("variant").get<std::string>());
  const KernelKind kind = kernel_kind_from_string(j.at("kernel").at("kind").get<std::string>());
  const double bandwidth = j.at("kernel").at("bandwidth").get<double>();
  const int class_count = j.at("class_count").get<int>();
  const FitResult model = load_fit_result(model_dir);

  NormalizeStats stats;
  stats.mode = normalize_from_string(j.at("normalize").get<std::string>());
  if (stats.mode != NormalizeMode::None) {
    stats.mean = load_matrix((dir / "norm_mean.fbin").string()).col(0);
    stats.std = load_matrix((dir / "norm_std.fbin").string()).col(0);
  }
  const Matrix x_new = apply_normalize(load_matrix(target_x), stats);

  Matrix z_new;  // k x m projected held-out samples
  if (kind == KernelKind::None) {
    if (x_new.rows() != model.a.rows())
      throw DataError("feature dimension mismatch with the saved projection");
    z_new = model.a.transpose() * x_new;
  } else {
    const Matrix train = load_matrix((dir / "train_inputs.fbin").string());
    if (x_new.rows() != train.rows())
      throw DataError("feature dimension mismatch with the saved training inputs");
    Matrix k_new;  // kernel rows between training and held-out samples
    if (kind == KernelKind::Linear) {
      k_new = train.transpose() * x_new;
    } else {
      double sigma = bandwidth;
      if (sigma == 0.0) {
        // The auto bandwidth was resolved over the training set; re-resolve it
        // there so held-out rows use the same kernel.
        Matrix d;
        dollda::kernels::pairwise_sqdist(train, train, d);
        std::vector<double> dists;
        for (Index i = 0; i < d.rows(); ++i)
          for (Index jj = i + 1; jj < d.cols(); ++jj) dists.push_back(std::sqrt(d(i, jj)));
        auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
        std::nth_element(dists.begin(), mid, dists.end());
        sigma = (*mid > 0.0) ? *mid : 1.0;
      }
      Matrix cross;
      dollda::kernels::pairwise_sqdist(train, x_new, cross);
      k_new = (-cross / (2.0 * sigma * sigma)).array().exp().matrix();
    }
    z_new = model.a.transpose() * k_new;
  }

  LabelVector predicted;
  if (variant == Variant::JDA || variant == Variant::CDDA_PLUS) {
    const LabelVector source_labels = load_labels((dir / "source_labels.txt").string());
    const Matrix zs = load_matrix((dir / "source_projected.fbin").string());
    predicted = nn_classify(zs, source_labels, z_new);
  } else {
    Matrix scores = z_new.transpose();  // m x k
    scores.rowwise() += model.e.transpose();
    predicted = hard_labels(scores, class_count);
  }

  save_labels(predicted, out_path);
  std::cout << "wrote " << predicted.size() << " predictions to " << out_path << '\n';
  if (!truth_path.empty()) {
    const LabelVector truth = load_labels(truth_path);
    std::cout << "accuracy " << accuracy(predicted, truth) << '\n';
  }
  return 0;
}

int cmd_benchmark(const std::string& manifest, const std::string& out_dir, int jobs,
                  bool emit_convergence) {
  if (!fs::exists(manifest)) throw ConfigError("manifest '" + manifest + "' does not exist");
  const SuiteResult suite = run_suite(manifest, jobs);
  if (!out_dir.empty()) write_suite_reports(suite, out_dir, emit_convergence);

  std::size_t failed = 0;
  std::cout << "task,variant,accuracy,seconds\n";
  for (const auto& report : suite.reports) {
    std::cout << report.task_name << ',' << to_string(report.variant) << ',';
    if (report.failed) {
      std::cout << "failed";
      ++failed;
    } else {
      std::cout << report.accuracy;
    }
    std::cout << ',' << report.wall_time_seconds << '\n';
  }
  for (const auto& [variant, mean] : suite.per_variant_mean)
    std::cout << "mean," << variant << ',' << mean << ",\n";
  for (const auto& report : suite.reports)
    if (report.failed) std::cerr << "task '" << report.task_name << "' failed: " << report.error << '\n';
  if (!suite.reports.empty() && failed == suite.reports.size()) return 1;
  return 0;
}

int cmd_synth(const std::string& out_dir, std::uint64_t seed, int classes, int per_class, int dim,
              double rotation, double noise) {
  const SyntheticTask task = make_synthetic(seed, per_class, classes, dim, rotation, noise);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  save_matrix(task.dataset.source_block(), (dir / "source_x.fbin").string(), MatrixFormat::Fbin);
  save_matrix(task.dataset.target_block(), (dir / "target_x.fbin").string(), MatrixFormat::Fbin);
  save_labels(task.dataset.source_labels, (dir / "source_y.txt").string());
  save_labels(task.target_truth, (dir / "target_truth.txt").string());
  std::cout << "wrote synthetic task (" << task.dataset.n_source << " source + "
            << task.dataset.n_target << " target samples, " << dim << " features) to " << out_dir
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discriminative domain adaptation via MMD alignment and orthogonal label regression"};
  app.require_subcommand(1);

  std::string source_x, source_y, target_x, out_dir;
  CommonFlags flags;
  auto* fit_cmd = app.add_subcommand("fit", "fit a model and write the result directory");
  fit_cmd->add_option("--source-x", source_x, "source feature matrix")->required();
  fit_cmd->add_option("--source-y", source_y, "source label file")->required();
  fit_cmd->add_option("--target-x", target_x, "target feature matrix")->required();
  fit_cmd->add_option("--out", out_dir, "output directory")->required();
  add_config_flags(fit_cmd, flags);

  std::string model_dir, predict_x, predict_out, truth_y;
  auto* predict_cmd = app.add_subcommand("predict", "predict labels with a saved model");
  predict_cmd->add_option("--model", model_dir, "directory written by fit")->required();
  predict_cmd->add_option("--target-x", predict_x, "feature matrix to label")->required();
  predict_cmd->add_option("--out", predict_out, "output label file")->required();
  predict_cmd->add_option("--truth-y", truth_y, "optional truth labels, prints accuracy");

  std::string manifest, bench_out;
  int jobs = 1;
  bool emit_convergence = false;
  auto* bench_cmd = app.add_subcommand("benchmark", "run a manifest of tasks");
  bench_cmd->add_option("--manifest", manifest, "JSON task manifest")->required();
  bench_cmd->add_option("--out", bench_out, "report output directory");
  bench_cmd->add_option("--jobs", jobs, "parallel tasks (default 1)");
  bench_cmd->add_flag("--emit-convergence", emit_convergence,
                      "write per-iteration accuracy CSVs");

  std::string synth_out;
  std::uint64_t synth_seed = 0;
  int synth_classes = 3, synth_per_class = 50, synth_dim = 20;
  double synth_rotation = 30.0, synth_noise = 0.5;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic rotated-Gaussian task");
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--seed", synth_seed, "RNG seed");
  synth_cmd->add_option("--classes", synth_classes, "class count (>= 2)");
  synth_cmd->add_option("--per-class", synth_per_class, "samples per class and domain");
  synth_cmd->add_option("--dim", synth_dim, "feature dimension");
  synth_cmd->add_option("--rotation", synth_rotation, "rotation in degrees");
  synth_cmd->add_option("--noise", synth_noise, "target noise sigma");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(source_x, source_y, target_x, out_dir, flags);
    if (predict_cmd->parsed()) return cmd_predict(model_dir, predict_x, predict_out, truth_y);
    if (bench_cmd->parsed()) return cmd_benchmark(manifest, bench_out, jobs, emit_convergence);
    if (synth_cmd->parsed())
      return cmd_synth(synth_out, synth_seed, synth_classes, synth_per_class, synth_dim,
                       synth_rotation, synth_noise);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
