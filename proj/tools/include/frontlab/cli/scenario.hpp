#pragma once

#include "frontlab/bv.hpp"
#include "frontlab/model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace frontlab::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct ModelSpec {
  std::string id;
  double gamma = 2.0;
  /// Box bounds; empty means the model's default box.
  std::vector<double> lo;
  std::vector<double> hi;
  /// Row-major 2x2 matrix for the linear model.
  std::vector<std::vector<double>> matrix;
};

struct InitialSpec {
  /// shock | rarefaction | two_shock | random_tv | pieces
  std::string preset;
  std::vector<double> left;
  std::vector<double> middle;
  std::vector<double> right;
  double x = 0.0;
  double x1 = 0.0;
  double x2 = 0.5;
  /// random_tv only; unset means "derive from the run seed".
  std::optional<std::uint64_t> seed;
  double tv_budget = 0.1;
  std::size_t jumps = 5;
  double x_lo = -0.5;
  double x_hi = 0.5;
  std::vector<double> breakpoints;
  std::vector<std::vector<double>> values;
};

struct CheckSpec {
  std::string name;
  /// Complete parameter object: defaults from the registry overlaid with the file.
  Json params;
};

struct GridSpec {
  std::vector<double> eps_grid;
  std::size_t seeds = 0;
  /// Scheme whose distance to the semigroup is tabulated over eps_grid.
  std::string scheme = "godunov";
  double delta_ref = 1e-3;
};

struct Scenario {
  std::string name;
  ModelSpec model;
  InitialSpec initial;
  double horizon = 1.0;
  double delta = 0.01;
  double eps = 0.01;
  double support_radius = 3.0;
  std::uint64_t seed = 0;
  std::vector<double> snapshot_times;
  std::vector<CheckSpec> checks;
  std::optional<GridSpec> grid;
  std::string output;
};

/// Strict parse: unknown fields, wrong types and unknown checks raise ConfigError
/// naming the offending field; JSON syntax errors name the line and column.
Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

/// Normalized form with every default spelled out; parse(emit(s)) reproduces s.
Json emit_scenario(const Scenario& s);

ModelPtr build_model(const ModelSpec& spec);
/// Initial datum; random presets without an explicit seed draw from `run_seed`.
PiecewiseConstantFn build_initial(const SystemModel& model, const InitialSpec& spec,
                                  std::uint64_t run_seed);

}  // namespace frontlab::cli
