#include "dollda/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <vector>

#include "dollda/gpi.hpp"
#include "dollda/kernels.hpp"
#include "dollda/matrix_io.hpp"
#include "dollda/mmd.hpp"

namespace dollda {

namespace {

bool uses_regression(Variant v) {
  return v == Variant::OLR || v == Variant::JOLR_DA || v == Variant::DOLL_DA;
}

LabelVector nn_labels(const Matrix& source, const LabelVector& source_labels,
                      const Matrix& target) {
  Matrix d;
  kernels::pairwise_sqdist(source, target, d);
  LabelVector out(static_cast<std::size_t>(target.cols()));
  for (Index j = 0; j < d.cols(); ++j) {
    Index best = 0;
    for (Index i = 1; i < d.rows(); ++i)
      if (d(i, j) < d(best, j)) best = i;
    out[static_cast<std::size_t>(j)] = source_labels[static_cast<std::size_t>(best)];
  }
  return out;
}

LabelVector initial_pseudo_labels(const DaDataset& ds, const Matrix& x_norm,
                                  const SolverConfig& cfg, const BaseClassifier& classifier) {
  if (cfg.init_labels == InitLabels::Random) {
    std::mt19937_64 rng(cfg.init_seed);
    LabelVector out(static_cast<std::size_t>(ds.n_target));
    for (auto& label : out)
      label = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(ds.class_count));
    return out;
  }
  const LabelVector out =
      classifier(x_norm.leftCols(ds.n_source), ds.source_labels, x_norm.rightCols(ds.n_target));
  if (static_cast<Index>(out.size()) != ds.n_target)
    throw DataError("initial classifier returned " + std::to_string(out.size()) +
                    " labels for " + std::to_string(ds.n_target) + " target samples");
  return out;
}

BaseClassifier default_classifier() {
  return [](const Matrix& train, const LabelVector& labels, const Matrix& test) {
    return nn_labels(train, labels, test);
  };
}

// Feasible coordinates for the projection update. With P = X h, every A
// obeying A^T (P P^T) A = I corresponds to a Stiefel point W-hat in the
// orthonormal column basis of P^T; running the power iteration there keeps the
// recovered A exactly feasible even when P is wide or rank-deficient.
//
// Directions with tiny singular values get ridge curvature alpha/sigma^2 after
// compression; they inflate the power-iteration shift and freeze the whole
// update while the optimum avoids them anyway. Beyond the numerical-rank
// cutoff we therefore also drop directions more than kConditionRatio below the
// leading singular value, never going under the requested subspace dimension.
struct FeasibleSpace {
  Matrix basis;      // n x r, orthonormal columns spanning the kept range(P^T)
  Matrix lift;       // l x r, A = lift * W-hat
  Matrix to_coords;  // r x l, W-hat_0 = to_coords * A (then re-orthonormalized)
  Index rank = 0;
};

constexpr double kConditionRatio = 1e-2;

FeasibleSpace make_feasible_space(const Matrix& p, Index k_needed) {
  Eigen::BDCSVD<Matrix> svd(p.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double rank_cutoff =
      sv.size() ? sv(0) * 1e-12 * static_cast<double>(std::max(p.rows(), p.cols())) : 0.0;
  Index numerical_rank = 0;
  while (numerical_rank < sv.size() && sv(numerical_rank) > rank_cutoff) ++numerical_rank;
  if (numerical_rank == 0) throw NumericalError("projection update: X h has numerical rank 0");

  Index conditioned = 0;
  while (conditioned < numerical_rank && sv(conditioned) >= sv(0) * kConditionRatio) ++conditioned;
  const Index r = std::max(std::min(k_needed, numerical_rank), conditioned);

  FeasibleSpace space;
  space.rank = r;
  space.basis = svd.matrixU().leftCols(r);
  space.lift = svd.matrixV().leftCols(r) * sv.head(r).cwiseInverse().asDiagonal();
  space.to_coords = sv.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
  return space;
}

// Nearest Stiefel point; the SVD completes rank-deficient inputs with an
// orthonormal basis, so this also handles warm starts with zero columns.
Matrix polar_orthonormalize(const Matrix& w) {
  Eigen::BDCSVD<Matrix> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Matrix out = svd.matrixU() * svd.matrixV().transpose();
  const double residual =
      (out.transpose() * out - Matrix::Identity(w.cols(), w.cols())).norm();
  if (!(residual <= 1e-8))
    throw NumericalError("projection update: warm start could not be orthonormalized");
  return out;
}

double regression_term(const Matrix& x, const Matrix& a, const Vector& e, const Matrix& y) {
  Matrix r = x.transpose() * a;
  r.rowwise() += e.transpose();
  return (r - y).squaredNorm();
}

FitResult fit_core(const DaDataset& ds, const SolverConfig& cfg, const Matrix& x_eff,
                   const LabelVector& init_pseudo) {
  const Index l = x_eff.rows();
  const Index n = x_eff.cols();
  const Index ns = ds.n_source;
  const Index nt = ds.n_target;
  const int c_count = ds.class_count;
  const int k = cfg.k;
  if (k < c_count)
    throw ConfigError("subspace dimension k = " + std::to_string(k) +
                      " must be >= class count C = " + std::to_string(c_count));
  if (k > l)
    throw ConfigError("subspace dimension k = " + std::to_string(k) +
                      " exceeds the feature dimension " + std::to_string(l));

  const bool regression = uses_regression(cfg.variant);

  FitResult result;
  LabelVector pseudo = init_pseudo;
  {
    LabelVector all = ds.source_labels;
    all.insert(all.end(), pseudo.begin(), pseudo.end());
    result.y = embed_labels(all, c_count, k);
  }
  result.e = Vector::Zero(k);

  const Matrix h_dense = centering_matrix(n);
  const CenteringFactor centering = factor_centering(n, cfg.centering_delta);

  if (cfg.variant == Variant::OLR) {
    // No alignment eigenproblem exists; start from the ridge normal equations
    // of the regression term with G = I and e = 0.
    Matrix normal = x_eff * x_eff.transpose();
    normal.diagonal().array() += cfg.alpha + cfg.beta;
    result.a = Eigen::LLT<Matrix>(normal).solve(x_eff * result.y.values);
  } else {
    const MmdAssembly init_asm =
        assemble_m_star(ds.source_labels, pseudo, c_count, ns, nt, Variant::JDA);
    result.a = init_a_eigen(x_eff, init_asm.m0 + init_asm.mc_sum, h_dense, cfg.alpha, k).a;
  }

  // Everything the inner projection update reuses across iterations.
  FeasibleSpace space;
  Matrix ppt;          // X (H + delta I) X^T, for the feasibility residual
  Matrix q_centered;   // (XH)(XH)^T + alpha I
  if (regression) {
    const Matrix p = x_eff * centering.h;
    space = make_feasible_space(p, k);
    if (k > space.rank)
      throw ConfigError("subspace dimension k = " + std::to_string(k) +
                        " exceeds the usable data rank " + std::to_string(space.rank));
    ppt = p * p.transpose();
    Matrix xc = x_eff;
    xc.colwise() -= x_eff.rowwise().mean();
    q_centered = xc * xc.transpose();
    q_centered.diagonal().array() += cfg.alpha;
  }

  for (int t = 0; t < cfg.outer_iters; ++t) {
    const MmdAssembly assembly =
        assemble_m_star(ds.source_labels, pseudo, c_count, ns, nt, cfg.variant);
    result.skipped_classes_log.push_back(assembly.skipped_classes);

    LabelVector new_pseudo;
    if (!regression) {
      // Alignment-only variants: re-solve the eigenproblem with the current
      // M*, then refresh pseudo-labels with 1-NN in the projected space.
      result.a = init_a_eigen(x_eff, assembly.m_star, h_dense, cfg.alpha, k).a;
      const Matrix z = result.a.transpose() * x_eff;
      new_pseudo = nn_labels(z.leftCols(ns), ds.source_labels, z.rightCols(nt));
      LabelVector all = ds.source_labels;
      all.insert(all.end(), new_pseudo.begin(), new_pseudo.end());
      result.y = embed_labels(all, c_count, k);
    } else {
      result.diagnostics.regression_term_trace.push_back(
          regression_term(x_eff, result.a, result.e, result.y.values));
      result.e = update_e(x_eff, result.a, result.y.values);
      result.diagnostics.regression_term_trace.push_back(
          regression_term(x_eff, result.a, result.e, result.y.values));

      Matrix q_outer = q_centered;
      if (cfg.variant != Variant::OLR) q_outer += (x_eff * assembly.m_star) * x_eff.transpose();
      // compress the iteration-constant part once; only beta*G changes per pass
      const Matrix b_outer = space.lift.transpose() * q_outer * space.lift;

      // C = h^{-1} H^T H Y compressed onto the feasible coordinates.
      Matrix hy = result.y.values;
      hy.rowwise() -= result.y.values.colwise().mean();
      hy.rowwise() -= hy.colwise().mean().eval();
      const Matrix c_full = centering.h.triangularView<Eigen::Lower>().solve(hy);
      const Matrix c_hat = space.basis.transpose() * c_full;

      for (int t1 = 0; t1 < cfg.inner_iters; ++t1) {
        const Vector g_diag =
            t1 == 0 ? Vector::Ones(l).eval() : update_g(result.a, cfg.epsilon);
        Matrix scaled_lift = space.lift;
        scaled_lift.array().colwise() *= g_diag.array();

        GpiProblem problem;
        problem.b = b_outer + cfg.beta * (space.lift.transpose() * scaled_lift);
        problem.b = 0.5 * (problem.b + problem.b.transpose()).eval();
        problem.c = c_hat;
        problem.mu = gpi_shift_bound(problem.b);
        if (!problem.b.allFinite())
          throw NumericalError("projection update: non-finite reduced quadratic term");

        const Matrix w0 = polar_orthonormalize(space.to_coords * result.a);
        const GpiResult gpi = gpi_iterate(problem, w0, cfg.gpi_tol, cfg.inner_iters);
        result.a = space.lift * gpi.w;
        result.diagnostics.constraint_residuals.push_back(
            (result.a.transpose() * ppt * result.a - Matrix::Identity(k, k)).norm());
      }

      result.diagnostics.regression_term_trace.push_back(
          regression_term(x_eff, result.a, result.e, result.y.values));
      result.y = update_y_target(x_eff, result.a, result.e, c_count, result.y, ns);
      result.diagnostics.regression_term_trace.push_back(
          regression_term(x_eff, result.a, result.e, result.y.values));
      new_pseudo = hard_labels(result.y.values.bottomRows(nt), c_count);
    }

    result.objective_trace.push_back(objective_value(result.a, result.e, result.y.values, x_eff,
                                                     assembly.m_star, cfg.alpha, cfg.beta));
    result.diagnostics.label_history.push_back(new_pseudo);
    result.iterations_run = t + 1;
    const bool stable = new_pseudo == pseudo;
    pseudo = std::move(new_pseudo);
    if (stable && cfg.early_stop) break;  // target hard labels reached a fixed point
  }

  result.target_labels = pseudo;
  return result;
}

}  // namespace

EmbeddedLabels update_y_target(const Matrix& x, const Matrix& a, const Vector& e, int class_count,
                               const EmbeddedLabels& y, Index n_source) {
  const Index n = x.cols();
  if (y.values.rows() != n) throw DataError("update_y_target: Y row count mismatch");
  if (n_source < 0 || n_source > n) throw DataError("update_y_target: bad source count");
  EmbeddedLabels out = y;
  const Index nt = n - n_source;
  if (nt == 0) return out;
  Matrix scores = x.rightCols(nt).transpose() * a;  // n_t x k
  scores.rowwise() += e.transpose();
  kernels::simplex_project_rows(scores, class_count);
  out.values.bottomRows(nt) = scores;
  return out;
}

double objective_value(const Matrix& a, const Vector& e, const Matrix& y, const Matrix& x,
                       const Matrix& m_star, double alpha, double beta) {
  const Matrix z = x.transpose() * a;  // n x k
  const double alignment = z.cwiseProduct(m_star * z).sum();
  double row_norm_sum = 0.0;
  for (Index i = 0; i < a.rows(); ++i) row_norm_sum += a.row(i).norm();
  Matrix residual = z - y;
  residual.rowwise() += e.transpose();
  return alignment + alpha * a.squaredNorm() + beta * row_norm_sum * row_norm_sum +
         residual.squaredNorm();
}

Matrix kernel_gram(const Matrix& x, const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::Linear:
      return x.transpose() * x;
    case KernelKind::Rbf: {
      if (spec.bandwidth < 0.0) throw ConfigError("rbf bandwidth must be positive or auto (0)");
      Matrix d;
      kernels::pairwise_sqdist(x, x, d);
      double sigma = spec.bandwidth;
      if (sigma == 0.0) {
        // Median heuristic over the distinct pairs.
        std::vector<double> dists;
        dists.reserve(static_cast<std::size_t>(d.rows()) * (d.rows() - 1) / 2);
        for (Index i = 0; i < d.rows(); ++i)
          for (Index j = i + 1; j < d.cols(); ++j) dists.push_back(std::sqrt(d(i, j)));
        if (dists.empty()) {
          sigma = 1.0;
        } else {
          auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
          std::nth_element(dists.begin(), mid, dists.end());
          sigma = *mid;
          if (!(sigma > 0.0)) sigma = 1.0;
        }
      }
      return (-d / (2.0 * sigma * sigma)).array().exp().matrix();
    }
    case KernelKind::None:
      break;
  }
  throw ConfigError("kernel_gram requires a linear or rbf kernel");
}

FitResult fit(const DaDataset& dataset, const SolverConfig& config,
              const BaseClassifier& initial_classifier) {
  config.validate();
  dataset.validate();
  const Matrix x_norm = normalize(dataset.x, config.normalize);
  const LabelVector pseudo = initial_pseudo_labels(dataset, x_norm, config, initial_classifier);
  return fit_core(dataset, config, x_norm, pseudo);
}

FitResult fit(const DaDataset& dataset, const SolverConfig& config) {
  return fit(dataset, config, default_classifier());
}

FitResult fit_with_gram(const DaDataset& dataset, const Matrix& gram, const SolverConfig& config,
                        const BaseClassifier& initial_classifier) {
  config.validate();
  dataset.validate();
  if (gram.rows() != gram.cols() || gram.rows() != dataset.total())
    throw DataError("gram matrix must be n x n over all samples");
  const double asym = (gram - gram.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8)
    throw DataError("gram matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  const Matrix x_norm = normalize(dataset.x, config.normalize);
  const LabelVector pseudo = initial_pseudo_labels(dataset, x_norm, config, initial_classifier);
  return fit_core(dataset, config, gram, pseudo);
}

FitResult fit_with_gram(const DaDataset& dataset, const Matrix& gram, const SolverConfig& config) {
  return fit_with_gram(dataset, gram, config, default_classifier());
}

FitResult fit_kernel(const DaDataset& dataset, const SolverConfig& config,
                     const BaseClassifier& initial_classifier) {
  if (config.kernel.kind == KernelKind::None)
    throw ConfigError("fit_kernel requires a linear or rbf kernel");
  config.validate();
  dataset.validate();
  const Matrix x_norm = normalize(dataset.x, config.normalize);
  return fit_with_gram(dataset, kernel_gram(x_norm, config.kernel), config, initial_classifier);
}

FitResult fit_kernel(const DaDataset& dataset, const SolverConfig& config) {
  return fit_kernel(dataset, config, default_classifier());
}

void save_fit_result(const FitResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  save_matrix(result.a, (dir / "a.fbin").string(), MatrixFormat::Fbin);
  save_matrix(result.e, (dir / "e.fbin").string(), MatrixFormat::Fbin);
  save_matrix(result.y.values, (dir / "y.fbin").string(), MatrixFormat::Fbin);

  nlohmann::json j;
  j["a"] = "a.fbin";
  j["e"] = "e.fbin";
  j["y"] = {{"values", "y.fbin"}, {"class_count", result.y.class_count}};
  j["target_labels"] = result.target_labels;
  j["objective_trace"] = result.objective_trace;
  j["iterations_run"] = result.iterations_run;
  auto& skipped = j["skipped_classes_log"] = nlohmann::json::array();
  for (const auto& entry : result.skipped_classes_log)
    skipped.push_back(std::vector<int>(entry.begin(), entry.end()));
  std::ofstream out(dir / "result.json", std::ios::trunc);
  if (!out) throw DataError("cannot write '" + (dir / "result.json").string() + "'");
  out << j.dump(2) << '\n';
}

FitResult load_fit_result(const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::ifstream in(dir / "result.json");
  if (!in) throw DataError("cannot open '" + (dir / "result.json").string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad result.json: ") + e.what());
  }
  FitResult result;
  try {
    result.a = load_matrix((dir / j.at("a").get<std::string>()).string(), MatrixFormat::Fbin);
    const Matrix e = load_matrix((dir / j.at("e").get<std::string>()).string(), MatrixFormat::Fbin);
    result.e = e.col(0);
    result.y.values = load_matrix((dir / j.at("y").at("values").get<std::string>()).string(),
                                  MatrixFormat::Fbin);
    result.y.class_count = j.at("y").at("class_count").get<int>();
    result.target_labels = j.at("target_labels").get<LabelVector>();
    result.objective_trace = j.at("objective_trace").get<std::vector<double>>();
    result.iterations_run = j.at("iterations_run").get<int>();
    for (const auto& entry : j.at("skipped_classes_log")) {
      const auto v = entry.get<std::vector<int>>();
      result.skipped_classes_log.emplace_back(v.begin(), v.end());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad result.json: ") + e.what());
  }
  return result;
}

}  // namespace dollda
