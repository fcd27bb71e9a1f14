#pragma once

#include "frontlab/cli/scenario.hpp"
#include "frontlab/local_estimates.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace frontlab::cli {

/// Everything a check may read. Side files go under `out` when it is non-empty,
/// prefixed by `tag` so sweep cells do not collide.
struct RunContext {
  const Scenario* scenario = nullptr;
  ModelPtr model;
  PiecewiseConstantFn u0;
  std::uint64_t seed = 0;
  double eps = 0.0;
  std::filesystem::path out;
  std::string tag;
};

struct CheckResult {
  std::string name;
  bool pass = true;
  /// Informational checks never change the exit code.
  bool asserted = true;
  std::vector<std::pair<std::string, double>> metrics;
  std::string message;
  std::vector<EstimateReport> estimates;

  void metric(std::string key, double value) { metrics.emplace_back(std::move(key), value); }
};

struct CheckDef {
  std::string name;
  Json defaults;
  std::function<CheckResult(const RunContext&, const Json&)> run;
};

const std::vector<CheckDef>& check_registry();
const CheckDef* find_check(const std::string& name);

}  // namespace frontlab::cli
