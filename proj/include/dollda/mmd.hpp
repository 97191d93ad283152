#ifndef DOLLDA_MMD_HPP
#define DOLLDA_MMD_HPP

#include <set>
#include <vector>

#include "dollda/config.hpp"
#include "dollda/types.hpp"

namespace dollda {

// Every MMD constraint matrix here is a sum of rank-1 terms v v^T where v holds
// 1/|group A| on one sample group and -1/|group B| on another, so each term is
// symmetric PSD and its entries sum to zero. Builders are pure; identical
// inputs give bit-identical outputs.

struct RepulsiveParts {
  Matrix s2t;  // source sub-domain c vs target sub-domains r != c
  Matrix t2s;  // target sub-domain c vs source sub-domains r != c
  Matrix s2s;  // source sub-domain pairs
};

struct MmdAssembly {
  Matrix m0;
  Matrix mc_sum;  // sum over classes of the conditional matrices
  Matrix m_rep;   // s2t + t2s + s2s
  Matrix m_star;
  std::set<int> skipped_classes;  // classes with an empty target pseudo-class
};

/// Marginal MMD matrix: entries 1/n_s^2, 1/n_t^2 and -1/(n_s n_t) across.
Matrix build_m0(Index n_s, Index n_t);

/// Conditional MMD matrix for class c. An empty target pseudo-class yields the
/// zero matrix and records c in *skipped (when non-null). target_pseudo_labels
/// may be empty, meaning no pseudo-labels exist yet.
Matrix build_mc(const LabelVector& source_labels, const LabelVector& target_pseudo_labels,
                int c, std::set<int>* skipped = nullptr);

/// The three repulsive matrices; class pairs touching an empty sub-domain
/// contribute zero.
RepulsiveParts build_repulsive(const LabelVector& source_labels,
                               const LabelVector& target_pseudo_labels, int class_count);

/// Combined matrix per variant: DOLL_DA/CDDA_PLUS use m0 + sum mc - m_rep,
/// JDA/JOLR_DA drop the repulsive part, OLR is the zero matrix.
MmdAssembly assemble_m_star(const LabelVector& source_labels,
                            const LabelVector& target_pseudo_labels, int class_count,
                            Index n_s, Index n_t, Variant variant);

/// || mean of A^T X over group_a - mean over group_b ||^2, computed directly.
/// The independent check for the tr(A^T X M X^T A) forms.
double direct_mmd_oracle(const Matrix& x, const Matrix& a, const std::vector<Index>& group_a,
                         const std::vector<Index>& group_b);

}  // namespace dollda

#endif  // DOLLDA_MMD_HPP
