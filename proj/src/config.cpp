#include "dollda/config.hpp"

#include <nlohmann/json.hpp>

namespace dollda {

using nlohmann::json;

void SolverConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1, got " + std::to_string(k));
  if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
  if (beta < 0.0) throw ConfigError("beta must be >= 0");
  if (outer_iters < 1) throw ConfigError("outer_iters must be >= 1");
  if (inner_iters < 1) throw ConfigError("inner_iters must be >= 1");
  if (!(gpi_tol > 0.0)) throw ConfigError("gpi_tol must be > 0");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(centering_delta > 0.0)) throw ConfigError("centering_delta must be > 0");
  if (kernel.kind == KernelKind::Rbf && kernel.bandwidth < 0.0)
    throw ConfigError("rbf bandwidth must be positive or auto");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::JDA: return "JDA";
    case Variant::OLR: return "OLR";
    case Variant::CDDA_PLUS: return "CDDA_PLUS";
    case Variant::JOLR_DA: return "JOLR_DA";
    case Variant::DOLL_DA: return "DOLL_DA";
  }
  return "DOLL_DA";
}

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::None: return "none";
    case KernelKind::Linear: return "linear";
    case KernelKind::Rbf: return "rbf";
  }
  return "none";
}

std::string to_string(NormalizeMode m) {
  switch (m) {
    case NormalizeMode::None: return "none";
    case NormalizeMode::Zscore: return "zscore";
    case NormalizeMode::ZscoreUnit: return "zscore_unit";
  }
  return "none";
}

Variant variant_from_string(const std::string& s) {
  if (s == "JDA") return Variant::JDA;
  if (s == "OLR") return Variant::OLR;
  if (s == "CDDA_PLUS") return Variant::CDDA_PLUS;
  if (s == "JOLR_DA") return Variant::JOLR_DA;
  if (s == "DOLL_DA") return Variant::DOLL_DA;
  throw ConfigError("unknown variant '" + s + "'");
}

KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "none") return KernelKind::None;
  if (s == "linear") return KernelKind::Linear;
  if (s == "rbf") return KernelKind::Rbf;
  throw ConfigError("unknown kernel '" + s + "'");
}

NormalizeMode normalize_from_string(const std::string& s) {
  if (s == "none") return NormalizeMode::None;
  if (s == "zscore") return NormalizeMode::Zscore;
  if (s == "zscore_unit" || s == "zscore-unit") return NormalizeMode::ZscoreUnit;
  throw ConfigError("unknown normalize mode '" + s + "'");
}

static json config_to_json_obj(const SolverConfig& cfg) {
  json j;
  j["k"] = cfg.k;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["outer_iters"] = cfg.outer_iters;
  j["inner_iters"] = cfg.inner_iters;
  j["gpi_tol"] = cfg.gpi_tol;
  j["epsilon"] = cfg.epsilon;
  j["centering_delta"] = cfg.centering_delta;
  j["variant"] = to_string(cfg.variant);
  j["kernel"] = {{"kind", to_string(cfg.kernel.kind)}, {"bandwidth", cfg.kernel.bandwidth}};
  j["init_labels"] = {{"mode", cfg.init_labels == InitLabels::Random ? "random" : "nearest_neighbor"},
                      {"seed", cfg.init_seed}};
  j["normalize"] = to_string(cfg.normalize);
  j["seed"] = cfg.seed;
  return j;
}

static SolverConfig config_from_json_obj(const json& j) {
  SolverConfig cfg;
  try {
    if (j.contains("k")) cfg.k = j.at("k").get<int>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
    if (j.contains("outer_iters")) cfg.outer_iters = j.at("outer_iters").get<int>();
    if (j.contains("inner_iters")) cfg.inner_iters = j.at("inner_iters").get<int>();
    if (j.contains("gpi_tol")) cfg.gpi_tol = j.at("gpi_tol").get<double>();
    if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
    if (j.contains("centering_delta")) cfg.centering_delta = j.at("centering_delta").get<double>();
    if (j.contains("variant")) cfg.variant = variant_from_string(j.at("variant").get<std::string>());
    if (j.contains("kernel")) {
      const auto& k = j.at("kernel");
      if (k.is_string()) {
        cfg.kernel.kind = kernel_kind_from_string(k.get<std::string>());
      } else {
        cfg.kernel.kind = kernel_kind_from_string(k.at("kind").get<std::string>());
        if (k.contains("bandwidth")) cfg.kernel.bandwidth = k.at("bandwidth").get<double>();
      }
    }
    if (j.contains("init_labels")) {
      const auto& il = j.at("init_labels");
      std::string mode = il.is_string() ? il.get<std::string>() : il.at("mode").get<std::string>();
      if (mode == "random") {
        cfg.init_labels = InitLabels::Random;
        if (il.is_object() && il.contains("seed")) cfg.init_seed = il.at("seed").get<std::uint64_t>();
      } else if (mode == "nearest_neighbor" || mode == "nn") {
        cfg.init_labels = InitLabels::NearestNeighbor;
      } else {
        throw ConfigError("unknown init_labels mode '" + mode + "'");
      }
    }
    if (j.contains("normalize")) cfg.normalize = normalize_from_string(j.at("normalize").get<std::string>());
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config JSON: ") + e.what());
  }
  return cfg;
}

std::string config_to_json(const SolverConfig& cfg) { return config_to_json_obj(cfg).dump(2); }

SolverConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json_obj(j);
}

}  // namespace dollda
