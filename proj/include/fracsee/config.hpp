#pragma once

// Key-value configuration files:
//
//   # comment
//   [section]
//   key = value
//
// Sections: run, model, schedule, kernels, initial, phase, noise, constants.
// A file with a [model] section describes the heat example; a file without
// one supplies hypothesis constants directly.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fracsee/dynamics.hpp"
#include "fracsee/existence.hpp"
#include "fracsee/heat_example.hpp"

namespace fracsee {

struct RunSettings {
  std::uint64_t seed = 0;
  std::size_t n_paths = 1;
  double dt = 1.0 / 256.0;
  std::size_t threads = 0;
  PicardOptions picard;
};

struct LoadedConfig {
  RunSettings run;
  bool has_model = false;
  HeatExampleConfig heat;
  /// Explicit [constants] entries (override the suggested ones when a model is present).
  std::map<std::string, std::string> constant_overrides;
  /// Every resolved setting as (section.key, value), defaults included.
  std::vector<std::pair<std::string, std::string>> echo;
};

/// ParseError (with line and key) on syntax errors, unknown keys or
/// malformed values; ValidationError listing every violated invariant.
LoadedConfig parse_config(std::istream& in);
LoadedConfig load_config(const std::string& path);

/// Constants for the existence check: suggested from the model (if any),
/// then overridden by the explicit [constants] entries.
HypothesisConstants resolve_constants(const LoadedConfig& cfg);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double x);

/// Config text for a heat-example configuration (round-trips through parse_config).
std::string render_config(const HeatExampleConfig& heat, const RunSettings& run);

}  // namespace fracsee
