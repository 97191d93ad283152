#ifndef DOLLDA_CONFIG_HPP
#define DOLLDA_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "dollda/types.hpp"

namespace dollda {

/// Model variants, from the alignment-only baseline to the full model.
enum class Variant {
  JDA,        // marginal + conditional MMD alignment, NN predictor
  OLR,        // orthogonal label regression only, no alignment
  CDDA_PLUS,  // alignment + repulsive terms, NN predictor
  JOLR_DA,    // alignment + label regression, no repulsive terms
  DOLL_DA,    // full model
};

enum class KernelKind { None, Linear, Rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::None;
  // <= 0 means "auto" (median pairwise distance) for the RBF kernel.
  double bandwidth = 0.0;
};

enum class InitLabels { NearestNeighbor, Random };

enum class NormalizeMode { None, Zscore, ZscoreUnit };

struct SolverConfig {
  int k = 100;                    // subspace dimension, k >= C
  double alpha = 1.0;             // ridge weight
  double beta = 0.1;              // row-sparsity weight
  int outer_iters = 10;           // T
  int inner_iters = 10;           // T1, also caps the power-iteration loop
  double gpi_tol = 1e-6;          // relative objective-change tolerance
  double epsilon = 1e-6;          // l2,1 smoothing
  double centering_delta = 1e-6;  // regularizer for the centering factorization
  Variant variant = Variant::DOLL_DA;
  KernelSpec kernel;
  InitLabels init_labels = InitLabels::NearestNeighbor;
  std::uint64_t init_seed = 0;    // used when init_labels == Random
  NormalizeMode normalize = NormalizeMode::ZscoreUnit;
  std::uint64_t seed = 0;
  // Stop outer iterations once target hard labels repeat; tests disable this
  // to observe the fixed point directly. Not part of the JSON schema.
  bool early_stop = true;

  /// Throws ConfigError on out-of-range fields (class-count checks happen in fit).
  void validate() const;
};

std::string to_string(Variant v);
std::string to_string(KernelKind k);
std::string to_string(NormalizeMode m);
Variant variant_from_string(const std::string& s);
KernelKind kernel_kind_from_string(const std::string& s);
NormalizeMode normalize_from_string(const std::string& s);

/// JSON round-trip for configs; the same schema is embedded in benchmark manifests.
std::string config_to_json(const SolverConfig& cfg);
SolverConfig config_from_json(const std::string& json_text);

}  // namespace dollda

#endif  // DOLLDA_CONFIG_HPP
