#ifndef DOLLDA_PIPELINE_HPP
#define DOLLDA_PIPELINE_HPP

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "dollda/config.hpp"
#include "dollda/dataset.hpp"
#include "dollda/labels.hpp"
#include "dollda/normalize.hpp"
#include "dollda/types.hpp"

namespace dollda {

/// Per-run numerics kept for tests and monitoring; not serialized.
struct FitDiagnostics {
  // ||A^T (X(H+dI)X^T) A - I||_F after each inner projection update.
  std::vector<double> constraint_residuals;
  // ||X^T A + 1 e^T - Y||_F^2 sampled around the e- and Y-updates, four
  // entries per outer iteration: before/after update_e, before/after the
  // target-row Y update.
  std::vector<double> regression_term_trace;
  // Target hard labels after each outer iteration.
  std::vector<LabelVector> label_history;
};

struct FitResult {
  Matrix a;                 // l x k (n x k in kernel mode)
  Vector e;                 // length k
  EmbeddedLabels y;         // n x k
  LabelVector target_labels;
  std::vector<double> objective_trace;  // one entry per outer iteration
  int iterations_run = 0;
  std::vector<std::set<int>> skipped_classes_log;
  FitDiagnostics diagnostics;
};

/// Replaces the target rows of y by the simplex projection of the first C
/// entries of A^T x_i + e (padding zeroed); source rows pass through untouched.
EmbeddedLabels update_y_target(const Matrix& x, const Matrix& a, const Vector& e,
                               int class_count, const EmbeddedLabels& y, Index n_source);

/// Exact objective with the true (unsmoothed) squared l2,1 norm:
///   tr(A^T X M* X^T A) + alpha ||A||_F^2 + beta ||A||_{2,1}^2
///   + ||X^T A + 1 e^T - Y||_F^2.
double objective_value(const Matrix& a, const Vector& e, const Matrix& y, const Matrix& x,
                       const Matrix& m_star, double alpha, double beta);

/// Linear: K = X^T X. Rbf: K_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)), sigma =
/// median pairwise distance when the bandwidth is left on auto.
Matrix kernel_gram(const Matrix& x, const KernelSpec& spec);

/// Base classifier used for the initial target pseudo-labels: maps (train
/// features, train labels, test features) to predicted labels. 1-NN is the
/// shipped default; swapping in an SVM or any other classifier is the
/// supported extension point. Ignored when config.init_labels is Random.
using BaseClassifier =
    std::function<LabelVector(const Matrix&, const LabelVector&, const Matrix&)>;

/// Coordinate-descent fit in the input feature space (config.kernel ignored).
FitResult fit(const DaDataset& dataset, const SolverConfig& config);
FitResult fit(const DaDataset& dataset, const SolverConfig& config,
              const BaseClassifier& initial_classifier);

/// Same pipeline with X replaced by the kernel Gram matrix.
FitResult fit_kernel(const DaDataset& dataset, const SolverConfig& config);
FitResult fit_kernel(const DaDataset& dataset, const SolverConfig& config,
                     const BaseClassifier& initial_classifier);

/// Kernel-mode fit on a caller-supplied Gram matrix; rejects asymmetric input
/// (max |K - K^T| entry above 1e-8).
FitResult fit_with_gram(const DaDataset& dataset, const Matrix& gram, const SolverConfig& config);
FitResult fit_with_gram(const DaDataset& dataset, const Matrix& gram, const SolverConfig& config,
                        const BaseClassifier& initial_classifier);

// FitResult serialization: JSON document with matrices as fbin side files
// (a.fbin, e.fbin, y.fbin) in the same directory.
void save_fit_result(const FitResult& result, const std::string& out_dir);
FitResult load_fit_result(const std::string& out_dir);

}  // namespace dollda

#endif  // DOLLDA_PIPELINE_HPP
