#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthcraft/error.hpp"
#include "depthcraft/estimators.hpp"

namespace depthcraft {

enum class DepthNotion {
  mahalanobis,
  projection,
  spatial,
  halfspace,
  simplicial,
  simplicial_volume,
  zonoid,
  spatial_local,
  potential
};

inline const std::vector<std::pair<DepthNotion, std::string>>& notion_names() {
  static const std::vector<std::pair<DepthNotion, std::string>> names = {
      {DepthNotion::mahalanobis, "mahalanobis"},
      {DepthNotion::projection, "projection"},
      {DepthNotion::spatial, "spatial"},
      {DepthNotion::halfspace, "halfspace"},
      {DepthNotion::simplicial, "simplicial"},
      {DepthNotion::simplicial_volume, "simplicial-volume"},
      {DepthNotion::zonoid, "zonoid"},
      {DepthNotion::spatial_local, "spatial-local"},
      {DepthNotion::potential, "potential"},
  };
  return names;
}

inline std::string to_string(DepthNotion n) {
  for (const auto& [k, v] : notion_names()) {
    if (k == n) return v;
  }
  return "unknown";
}

inline DepthNotion notion_from_string(const std::string& s) {
  for (const auto& [k, v] : notion_names()) {
    if (v == s) return k;
  }
  std::string known;
  for (const auto& [k, v] : notion_names()) known += (known.empty() ? "" : ", ") + v;
  throw ParameterError("notion: unknown depth notion '" + s + "' (expected one of: " + known + ")");
}

/// Everything that determines a depth function: the notion plus its knobs.
/// Fields that do not apply to the chosen notion keep their defaults.
struct DepthSpec {
  DepthNotion notion = DepthNotion::halfspace;
  Estimator estimator = Estimator::moment;
  double mcd_fraction = 0.75;
  bool exact = true;
  int num_directions = 1000;
  bool refine = false;              // projection: Nelder-Mead polish ("linearize")
  double simplex_count = 1000;      // > 1: number of simplices, in (0,1): fraction
  std::vector<double> bandwidth;    // one value, or one per class
  bool pretransform = true;         // potential: pooled moment standardization
  std::uint64_t seed = 0;
  long halfspace_cap = 60;          // exact halfspace, d >= 3
  double simplex_cap = 1e7;         // exact simplicial enumeration

  /// Spec with notion-appropriate defaults (projection is never exact).
  static DepthSpec of(DepthNotion notion) {
    DepthSpec s;
    s.notion = notion;
    if (notion == DepthNotion::projection) s.exact = false;
    if (notion == DepthNotion::spatial_local || notion == DepthNotion::potential) s.bandwidth = {1.0};
    return s;
  }

  bool uses_estimator() const {
    return notion == DepthNotion::mahalanobis || notion == DepthNotion::spatial ||
           notion == DepthNotion::spatial_local || notion == DepthNotion::simplicial_volume;
  }

  bool uses_directions() const {
    return !exact && (notion == DepthNotion::projection || notion == DepthNotion::halfspace);
  }

  bool bounded() const { return notion != DepthNotion::potential && notion != DepthNotion::spatial_local; }

  double bandwidth_for(int cls) const {
    if (bandwidth.empty()) return 1.0;
    if (bandwidth.size() == 1) return bandwidth.front();
    return bandwidth.at(static_cast<std::size_t>(cls));
  }

  /// Throws ParameterError naming the offending field.
  void validate(Index dim = 0, int classes = 0) const {
    if (notion == DepthNotion::projection && exact) {
      throw ParameterError("exact: projection depth has no exact algorithm; use approximation");
    }
    if (estimator == Estimator::none && notion != DepthNotion::spatial && notion != DepthNotion::spatial_local) {
      throw ParameterError("estimator: 'none' is only allowed with spatial and spatial-local depth");
    }
    if (estimator == Estimator::mcd && !(mcd_fraction > 0.5 && mcd_fraction <= 1.0)) {
      throw ParameterError("mcd-fraction: must lie in (0.5, 1]");
    }
    if (uses_directions() && num_directions < 1) {
      throw ParameterError("num-directions: must be at least 1");
    }
    if ((notion == DepthNotion::simplicial || notion == DepthNotion::simplicial_volume) && !exact &&
        !(simplex_count > 0.0 && simplex_count != 1.0)) {
      throw ParameterError("simplex-count: must be a count > 1 or a fraction in (0, 1)");
    }
    bool kernel = notion == DepthNotion::spatial_local || notion == DepthNotion::potential;
    if (!kernel && !bandwidth.empty()) {
      throw ParameterError("bandwidth: only used by spatial-local and potential depth");
    }
    for (double h : bandwidth) {
      if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("bandwidth: must be positive");
    }
    if (classes > 0 && bandwidth.size() > 1 && static_cast<int>(bandwidth.size()) != classes) {
      throw ParameterError("bandwidth: give one value or one per class (" + std::to_string(classes) + ")");
    }
    if (halfspace_cap < 1) throw ParameterError("halfspace-cap: must be positive");
    if (!(simplex_cap >= 1.0)) throw ParameterError("simplex-cap: must be at least 1");
    if (dim < 0) throw ParameterError("dimension must be positive");
  }
};

inline void to_json(nlohmann::json& j, const DepthSpec& s) {
  j = nlohmann::json{{"notion", to_string(s.notion)},
                     {"estimator", to_string(s.estimator)},
                     {"mcd_fraction", s.mcd_fraction},
                     {"exact", s.exact},
                     {"num_directions", s.num_directions},
                     {"refine", s.refine},
                     {"simplex_count", s.simplex_count},
                     {"bandwidth", s.bandwidth},
                     {"pretransform", s.pretransform},
                     {"seed", s.seed},
                     {"halfspace_cap", s.halfspace_cap},
                     {"simplex_cap", s.simplex_cap}};
}

inline void from_json(const nlohmann::json& j, DepthSpec& s) {
  s.notion = notion_from_string(j.at("notion").get<std::string>());
  s.estimator = estimator_from_string(j.at("estimator").get<std::string>());
  s.mcd_fraction = j.at("mcd_fraction").get<double>();
  s.exact = j.at("exact").get<bool>();
  s.num_directions = j.at("num_directions").get<int>();
  s.refine = j.at("refine").get<bool>();
  s.simplex_count = j.at("simplex_count").get<double>();
  s.bandwidth = j.at("bandwidth").get<std::vector<double>>();
  s.pretransform = j.at("pretransform").get<bool>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.halfspace_cap = j.at("halfspace_cap").get<long>();
  s.simplex_cap = j.at("simplex_cap").get<double>();
}

/// Diagnostics an exact combinatorial depth may raise.
struct DepthDiagnostics {
  bool jittered = false;  // input was not in general position and was perturbed
};

}  // namespace depthcraft
