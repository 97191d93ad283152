#include "dollda/mmd.hpp"

#include <string>

#include "dollda/kernels.hpp"

namespace dollda {

namespace {

// Target pseudo-labels may carry 0 meaning "not yet labeled"; such samples
// belong to no sub-domain. Source labels must be in 1..C.
std::vector<std::vector<Index>> class_members(const LabelVector& labels, int class_count,
                                              Index offset, bool allow_unlabeled) {
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(class_count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label == 0 && allow_unlabeled) continue;
    if (label < 1 || label > class_count)
      throw DataError("label " + std::to_string(label) + " is outside 1.." +
                      std::to_string(class_count));
    members[static_cast<std::size_t>(label - 1)].push_back(offset + static_cast<Index>(i));
  }
  return members;
}

// The elementary building block: v has +1/|ga| on ga and -1/|gb| on gb, so
// v v^T is PSD with entries summing to (1^T v)^2 = 0.
Vector group_contrast(Index n, const std::vector<Index>& ga, const std::vector<Index>& gb) {
  Vector v = Vector::Zero(n);
  const double wa = 1.0 / static_cast<double>(ga.size());
  const double wb = 1.0 / static_cast<double>(gb.size());
  for (Index i : ga) v(i) += wa;
  for (Index i : gb) v(i) -= wb;
  return v;
}

Matrix accumulate(Index n, const std::vector<Vector>& vs) {
  if (vs.empty()) return Matrix::Zero(n, n);
  Matrix components(n, static_cast<Index>(vs.size()));
  for (std::size_t t = 0; t < vs.size(); ++t) components.col(static_cast<Index>(t)) = vs[t];
  Matrix out;
  kernels::weighted_gram_accumulate(components, Vector::Ones(components.cols()), out);
  return out;
}

}  // namespace

Matrix build_m0(Index n_s, Index n_t) {
  if (n_s < 1 || n_t < 1) throw ConfigError("build_m0 requires n_s >= 1 and n_t >= 1");
  std::vector<Index> src(static_cast<std::size_t>(n_s));
  std::vector<Index> tgt(static_cast<std::size_t>(n_t));
  for (Index i = 0; i < n_s; ++i) src[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < n_t; ++i) tgt[static_cast<std::size_t>(i)] = n_s + i;
  return accumulate(n_s + n_t, {group_contrast(n_s + n_t, src, tgt)});
}

Matrix build_mc(const LabelVector& source_labels, const LabelVector& target_pseudo_labels, int c,
                std::set<int>* skipped) {
  const Index n_s = static_cast<Index>(source_labels.size());
  const Index n_t = static_cast<Index>(target_pseudo_labels.size());
  const Index n = n_s + n_t;
  std::vector<Index> src, tgt;
  for (Index i = 0; i < n_s; ++i)
    if (source_labels[static_cast<std::size_t>(i)] == c) src.push_back(i);
  for (Index i = 0; i < n_t; ++i)
    if (target_pseudo_labels[static_cast<std::size_t>(i)] == c) tgt.push_back(n_s + i);
  if (src.empty() || tgt.empty()) {
    if (skipped) skipped->insert(c);
    return Matrix::Zero(n, n);
  }
  return accumulate(n, {group_contrast(n, src, tgt)});
}

RepulsiveParts build_repulsive(const LabelVector& source_labels,
                               const LabelVector& target_pseudo_labels, int class_count) {
  const Index n_s = static_cast<Index>(source_labels.size());
  const Index n_t = static_cast<Index>(target_pseudo_labels.size());
  const Index n = n_s + n_t;
  const auto src = class_members(source_labels, class_count, 0, false);
  const auto tgt = class_members(target_pseudo_labels, class_count, n_s, true);

  std::vector<Vector> s2t, t2s, s2s;
  for (int c = 0; c < class_count; ++c) {
    for (int r = 0; r < class_count; ++r) {
      if (r == c) continue;
      const auto& sc = src[static_cast<std::size_t>(c)];
      const auto& sr = src[static_cast<std::size_t>(r)];
      const auto& tc = tgt[static_cast<std::size_t>(c)];
      const auto& tr = tgt[static_cast<std::size_t>(r)];
      if (!sc.empty() && !tr.empty()) s2t.push_back(group_contrast(n, sc, tr));
      if (!tc.empty() && !sr.empty()) t2s.push_back(group_contrast(n, tc, sr));
      if (!sc.empty() && !sr.empty()) s2s.push_back(group_contrast(n, sc, sr));
    }
  }
  RepulsiveParts parts;
  parts.s2t = accumulate(n, s2t);
  parts.t2s = accumulate(n, t2s);
  parts.s2s = accumulate(n, s2s);
  return parts;
}

MmdAssembly assemble_m_star(const LabelVector& source_labels,
                            const LabelVector& target_pseudo_labels, int class_count, Index n_s,
                            Index n_t, Variant variant) {
  if (static_cast<Index>(source_labels.size()) != n_s)
    throw DataError("assemble_m_star: source label count mismatch");
  LabelVector pseudo = target_pseudo_labels;
  if (pseudo.empty()) pseudo.assign(static_cast<std::size_t>(n_t), 0);  // no pseudo-labels yet
  if (static_cast<Index>(pseudo.size()) != n_t)
    throw DataError("assemble_m_star: target pseudo-label count mismatch");
  const Index n = n_s + n_t;

  MmdAssembly out;
  if (variant == Variant::OLR) {
    out.m0 = Matrix::Zero(n, n);
    out.mc_sum = Matrix::Zero(n, n);
    out.m_rep = Matrix::Zero(n, n);
    out.m_star = Matrix::Zero(n, n);
    return out;
  }

  out.m0 = build_m0(n_s, n_t);
  out.mc_sum = Matrix::Zero(n, n);
  for (int c = 1; c <= class_count; ++c)
    out.mc_sum += build_mc(source_labels, pseudo, c, &out.skipped_classes);

  if (variant == Variant::CDDA_PLUS || variant == Variant::DOLL_DA) {
    const RepulsiveParts parts = build_repulsive(source_labels, pseudo, class_count);
    out.m_rep = parts.s2t + parts.t2s + parts.s2s;
  } else {
    out.m_rep = Matrix::Zero(n, n);
  }
  out.m_star = out.m0 + out.mc_sum - out.m_rep;
  return out;
}

double direct_mmd_oracle(const Matrix& x, const Matrix& a, const std::vector<Index>& group_a,
                         const std::vector<Index>& group_b) {
  if (group_a.empty() || group_b.empty()) throw DataError("direct_mmd_oracle: empty sample group");
  const Matrix z = a.transpose() * x;  // k x n projected samples
  Vector mean_a = Vector::Zero(z.rows());
  Vector mean_b = Vector::Zero(z.rows());
  for (Index i : group_a) mean_a += z.col(i);
  for (Index i : group_b) mean_b += z.col(i);
  mean_a /= static_cast<double>(group_a.size());
  mean_b /= static_cast<double>(group_b.size());
  return (mean_a - mean_b).squaredNorm();
}

}  // namespace dollda
