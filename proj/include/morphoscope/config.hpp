#pragma once

// Scenario configuration files (JSON) and their canonical form.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "morphoscope/calculus.hpp"
#include "morphoscope/twistor.hpp"

namespace morpho {

using json = nlohmann::json;

struct AnalysisConfig {
  std::optional<double> tolerance;
  double critical_threshold = 1e-9;
  Vec4 center = Vec4::Zero();
  std::vector<double> radii;       // rate fits
  std::vector<double> scan_radii;  // annuli of the product scan
  int directions = 16;
  std::uint64_t seed = 1;
  double fd_step = 1e-5;
  int samples = 100;
  int orientation = 1;  // orientation of the reference structure
  double angle = 0.0;   // rotation of T in the vertical plane
  std::vector<Vec4> points;
};

struct PatchConfig {
  std::string name;
  SurfacePatch patch;
  int tag = 1;
  std::vector<Vec2> parameters;
  std::optional<bool> minimal;           // expected verdict of the lift residual
  std::optional<double> omega_T_abs;     // expected |Omega^T|
  std::optional<double> omega_N;         // expected Omega^N
};

struct ScenarioConfig {
  json canonical;  // normalized configuration, defaults filled in
  MorphismScenario scenario;
  AnalysisConfig analysis;
  std::vector<PatchConfig> patches;

  const PatchConfig& patch(const std::string& name) const;
};

/// Validates and builds a scenario. Throws ConfigError naming the offending field.
ScenarioConfig parse_config(const json& j);
ScenarioConfig load_config(const std::string& path);

/// 64-bit FNV-1a of the compact dump of j, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);
std::string fingerprint(const json& j);

json polynomial_to_json(const RealPoly& p);

}  // namespace morpho
