#pragma once

// Scenario files: one JSON document with model / discretization / force /
// filter / experiment / output sections. The grammar is documented in
// README.md; scenarios/optomechanical.json is the bundled optomechanical example.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "forcetrack/discretize.hpp"
#include "forcetrack/experiment.hpp"
#include "forcetrack/model.hpp"
#include "forcetrack/simkit.hpp"

namespace forcetrack {

struct Scenario {
  enum class ModelKind { kOptomechanical, kMatrices };
  ModelKind model_kind = ModelKind::kOptomechanical;
  OptoParams opto;           // kOptomechanical
  ContinuousModel matrices;  // kMatrices

  double dt = 0.0;
  ForceSignal force = force::Constant{};
  FilterInit filter;

  long steps = 1000;
  std::uint64_t seed = 1;
  long n_runs = 100;
  Vector initial_state;  // truth x_0; zeros when omitted
  long steady_state_start = 50;
  bool identical_seeds = false;

  std::filesystem::path output_dir = ".";

  /// Builds (and for kOptomechanical, validates) the continuous model.
  ContinuousModel continuous_model() const;
};

/// Throws ConfigError naming the offending field. Relative force-file paths
/// resolve against `base_dir`.
Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");

/// Parses text; JSON syntax errors report line and column.
Scenario parse_scenario_text(const std::string& text,
                             const std::filesystem::path& base_dir = ".");

/// Throws IoError when the file cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical JSON form; parse_scenario(to_json(s)) reproduces s.
nlohmann::json to_json(const Scenario& scenario);

}  // namespace forcetrack
