#pragma once

#include "frontlab/cli/checks.hpp"
#include "frontlab/cli/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace frontlab::cli {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2 };

struct RunOptions {
  std::filesystem::path scenario;
  /// Empty: the scenario's `output` field, else "frontlab_out".
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
};

struct CellReport {
  std::string label;
  std::uint64_t seed = 0;
  double eps = 0.0;
  std::vector<CheckResult> checks;
  std::optional<double> distance;
};

struct Report {
  std::string mode;
  std::uint64_t seed = 0;
  Json scenario;
  std::vector<CellReport> cells;
  Json summary;
  int exit_code = kExitPass;
};

/// Runs every check of every cell; cells execute on `jobs` workers, results are
/// gathered in cell order so the report does not depend on scheduling.
Report execute(const Scenario& scenario, const std::string& mode, std::uint64_t seed,
               std::size_t jobs, const std::filesystem::path& out);

/// report.json, report.csv and estimates.csv under `out`.
void write_reports(const Report& report, const std::filesystem::path& out);
Json report_json(const Report& report);

/// `verify` and `sweep`: exit 0 when all asserted checks pass, 1 on failure,
/// 2 on configuration errors. Diagnostics go to `err`.
int run_verify(const RunOptions& options, std::ostream& log, std::ostream& err);
int run_sweep(const RunOptions& options, std::ostream& log, std::ostream& err);

/// Full command line, as used by the frontlab executable.
int main_entry(int argc, char** argv);

/// Run `fn(i)` for i in [0, n) on up to `jobs` threads. The first exception is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace frontlab::cli
