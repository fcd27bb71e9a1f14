#include "frontlab/cli/app.hpp"

#include "frontlab/certifier.hpp"
#include "frontlab/error.hpp"
#include "frontlab/front_tracking.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace frontlab::cli {
namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Cell {
  CellReport report;
  PiecewiseConstantFn u0;
  std::string tag;
};

double scheme_distance(const ModelPtr& model, const PiecewiseConstantFn& u0, const Scenario& sc,
                       const GridSpec& grid, double eps) {
  const Scheme scheme = [&](double e) {
    if (grid.scheme == "godunov") return godunov_scheme(model, u0, e, sc.horizon, sc.support_radius);
    return front_tracking_scheme(model, u0, e, sc.horizon, sc.support_radius);
  };
  return convergence_rate(model, scheme, {eps}, sc.horizon, grid.delta_ref).rows.front().distance;
}

void write_snapshots(const ModelPtr& model, const Cell& cell, const Scenario& sc,
                     const std::filesystem::path& out) {
  if (sc.snapshot_times.empty() || out.empty()) return;
  TrackingOptions o;
  o.record_history = true;
  FrontTrackingRun run(model, cell.u0, sc.delta, o);
  run.advance(sc.horizon);
  const auto dir = out / "snapshots";
  std::filesystem::create_directories(dir);
  for (std::size_t k = 0; k < sc.snapshot_times.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "%st%03zu.txt", cell.tag.c_str(), k);
    std::ofstream f(dir / name);
    write_text(f, run.snapshot(sc.snapshot_times[k]));
  }
}

}  // namespace

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

Report execute(const Scenario& sc, const std::string& mode, std::uint64_t seed, std::size_t jobs,
               const std::filesystem::path& out) {
  if (mode != "verify" && mode != "sweep") throw ConfigError("unknown mode " + mode);
  if (mode == "sweep" && !sc.grid) throw ConfigError("sweep needs a grid section (eps_grid or seeds)");
  const ModelPtr model = build_model(sc.model);

  std::vector<Cell> cells;
  auto add_cell = [&](std::string label, std::string tag, std::uint64_t s, double eps) {
    Cell c;
    c.report.label = std::move(label);
    c.report.seed = s;
    c.report.eps = eps;
    c.tag = std::move(tag);
    c.u0 = build_initial(*model, sc.initial, s);
    cells.push_back(std::move(c));
  };
  const bool rate_sweep = mode == "sweep" && !sc.grid->eps_grid.empty();
  if (mode == "verify") {
    add_cell("main", "", seed, sc.eps);
  } else if (rate_sweep) {
    const auto& grid = sc.grid->eps_grid;
    for (std::size_t k = 1; k < grid.size(); ++k) {
      if (!(grid[k] < grid[k - 1])) throw ConfigError("grid.eps_grid must decrease");
    }
    if (!(sc.grid->delta_ref < grid.back())) {
      throw ConfigError("grid.delta_ref must be finer than every eps");
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      add_cell("eps[" + std::to_string(k) + "]", "eps" + std::to_string(k) + "_", seed, grid[k]);
    }
  } else {
    for (std::size_t i = 0; i < sc.grid->seeds; ++i) {
      add_cell("seed[" + std::to_string(i) + "]", "seed" + std::to_string(i) + "_",
               CounterRng(seed, i + 1).next(), sc.eps);
    }
  }
  if (!out.empty()) std::filesystem::create_directories(out);

  // One task per (cell, check), plus a distance task per cell of a rate sweep and a
  // snapshot task per cell.
  struct Task {
    std::size_t cell;
    std::size_t check;  // == checks.size(): distance, == size + 1: snapshots
  };
  const std::size_t nchecks = sc.checks.size();
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    cells[c].report.checks.resize(nchecks);
    for (std::size_t k = 0; k < nchecks; ++k) tasks.push_back({c, k});
    if (rate_sweep) tasks.push_back({c, nchecks});
    if (!sc.snapshot_times.empty()) tasks.push_back({c, nchecks + 1});
  }
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const Task t = tasks[i];
    Cell& cell = cells[t.cell];
    if (t.check == nchecks) {
      cell.report.distance = scheme_distance(model, cell.u0, sc, *sc.grid, cell.report.eps);
      return;
    }
    if (t.check == nchecks + 1) {
      write_snapshots(model, cell, sc, out);
      return;
    }
    const CheckSpec& spec = sc.checks[t.check];
    RunContext ctx;
    ctx.scenario = &sc;
    ctx.model = model;
    ctx.u0 = cell.u0;
    ctx.seed = cell.report.seed;
    ctx.eps = cell.report.eps;
    ctx.out = out;
    ctx.tag = cell.tag + std::to_string(t.check) + "_" + spec.name + "_";
    CheckResult r;
    try {
      r = find_check(spec.name)->run(ctx, spec.params);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      r = CheckResult{};
      r.pass = false;
      r.message = e.what();
    }
    r.name = spec.name;
    cell.report.checks[t.check] = std::move(r);
  });

  Report rep;
  rep.mode = mode;
  rep.seed = seed;
  rep.scenario = emit_scenario(sc);
  std::size_t passed = 0, failed = 0, cells_passed = 0;
  Json failing = Json::array();
  for (Cell& c : cells) {
    bool ok = true;
    for (const CheckResult& r : c.report.checks) {
      if (!r.asserted) continue;
      if (r.pass) {
        ++passed;
      } else {
        ++failed;
        ok = false;
        failing.push_back(c.report.label + "/" + r.name);
      }
    }
    if (ok) ++cells_passed;
    rep.cells.push_back(std::move(c.report));
  }
  rep.summary["checks_passed"] = passed;
  rep.summary["checks_failed"] = failed;
  rep.summary["failing"] = failing;
  bool all_ok = failed == 0;
  if (mode == "sweep") {
    rep.summary["cells"] = rep.cells.size();
    rep.summary["cells_passed"] = cells_passed;
  }
  if (rate_sweep) {
    std::vector<double> x, y;
    Json rows = Json::array();
    bool monotone = true;
    for (std::size_t k = 0; k < rep.cells.size(); ++k) {
      const double eps = rep.cells[k].eps, d = *rep.cells[k].distance;
      if (k && d > 1.05 * y.back()) monotone = false;
      x.push_back(eps);
      y.push_back(d);
      rows.push_back(Json{{"eps", eps},
                          {"distance", d},
                          {"conjecture_ratio", d / (std::sqrt(eps) * std::abs(std::log(eps)))}});
    }
    double slope = 0.0;
    if (x.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      std::size_t n = 0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(y[k] > 0.0)) continue;
        const double a = std::log(x[k]), b = std::log(y[k]);
        sx += a, sy += b, sxx += a * a, sxy += a * b, ++n;
      }
      if (n >= 2) slope = (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
    }
    rep.summary["rate"] = Json{{"rows", rows}, {"slope", slope}, {"monotone", monotone}};
    all_ok = all_ok && monotone;
  }
  rep.summary["all_pass"] = all_ok;
  rep.exit_code = all_ok ? kExitPass : kExitFail;
  return rep;
}

Json report_json(const Report& rep) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["mode"] = rep.mode;
  j["seed"] = rep.seed;
  j["scenario"] = rep.scenario;
  Json cells = Json::array();
  for (const CellReport& c : rep.cells) {
    Json cj;
    cj["label"] = c.label;
    cj["seed"] = c.seed;
    cj["eps"] = c.eps;
    if (c.distance) cj["distance"] = *c.distance;
    Json checks = Json::array();
    for (const CheckResult& r : c.checks) {
      Json m = Json::object();
      for (const auto& [k, v] : r.metrics) m[k] = v;
      Json rj{{"name", r.name}, {"pass", r.pass}, {"asserted", r.asserted}, {"metrics", m}};
      if (!r.message.empty()) rj["message"] = r.message;
      checks.push_back(rj);
    }
    cj["checks"] = checks;
    cells.push_back(cj);
  }
  j["cells"] = cells;
  j["summary"] = rep.summary;
  j["exit_code"] = rep.exit_code;
  return j;
}

void write_reports(const Report& rep, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  {
    std::ofstream f(out / "report.json");
    f << report_json(rep).dump(2) << '\n';
  }
  {
    std::ofstream f(out / "report.csv");
    f << "cell,check,metric,value\n";
    for (const CellReport& c : rep.cells) {
      if (c.distance) f << c.label << ",rate,distance," << fmt(*c.distance) << '\n';
      for (const CheckResult& r : c.checks) {
        f << c.label << ',' << r.name << ",pass," << (r.pass ? 1 : 0) << '\n';
        for (const auto& [k, v] : r.metrics) f << c.label << ',' << r.name << ',' << k << ',' << fmt(v) << '\n';
      }
    }
    if (rep.summary.contains("rate")) {
      f << "summary,rate,slope," << fmt(rep.summary["rate"]["slope"].get<double>()) << '\n';
      f << "summary,rate,monotone," << (rep.summary["rate"]["monotone"].get<bool>() ? 1 : 0) << '\n';
    }
    f << "summary,all,pass," << (rep.summary["all_pass"].get<bool>() ? 1 : 0) << '\n';
  }
  {
    std::vector<EstimateReport> all;
    for (const CellReport& c : rep.cells) {
      for (const CheckResult& r : c.checks) all.insert(all.end(), r.estimates.begin(), r.estimates.end());
    }
    std::ofstream f(out / "estimates.csv");
    write_reports_csv(f, all);
  }
  if (rep.summary.contains("rate")) {
    std::ofstream f(out / "rate.csv");
    f << "eps,distance,conjecture_ratio\n";
    for (const Json& row : rep.summary["rate"]["rows"]) {
      f << fmt(row["eps"].get<double>()) << ',' << fmt(row["distance"].get<double>()) << ','
        << fmt(row["conjecture_ratio"].get<double>()) << '\n';
    }
  }
}

namespace {

int run_mode(const std::string& mode, const RunOptions& options, std::ostream& log,
             std::ostream& err) {
  try {
    const Scenario sc = load_scenario(options.scenario);
    const std::uint64_t seed = options.seed.value_or(sc.seed);
    std::filesystem::path out = options.out;
    if (out.empty()) out = sc.output.empty() ? std::filesystem::path("frontlab_out") : std::filesystem::path(sc.output);
    const Report rep = execute(sc, mode, seed, options.jobs, out);
    write_reports(rep, out);
    for (const CellReport& c : rep.cells) {
      for (const CheckResult& r : c.checks) {
        log << (r.pass ? "PASS " : "FAIL ") << c.label << '/' << r.name << '\n';
        if (!r.pass && r.asserted) {
          err << "failing check " << c.label << '/' << r.name;
          if (!r.message.empty()) err << ": " << r.message;
          err << '\n';
        }
      }
    }
    if (rep.summary.contains("rate")) {
      log << "rate slope " << fmt(rep.summary["rate"]["slope"].get<double>()) << ", monotone "
          << (rep.summary["rate"]["monotone"].get<bool>() ? "yes" : "no") << '\n';
    }
    log << "report written to " << (out / "report.json").string() << '\n';
    return rep.exit_code;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "run failed: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace

int run_verify(const RunOptions& options, std::ostream& log, std::ostream& err) {
  return run_mode("verify", options, log, err);
}

int run_sweep(const RunOptions& options, std::ostream& log, std::ostream& err) {
  return run_mode("sweep", options, log, err);
}

int main_entry(int argc, char** argv) {
  CLI::App app{"frontlab: front tracking and a-posteriori checks for 1D conservation laws"};
  app.require_subcommand(1);
  RunOptions opts;
  std::uint64_t seed = 0;
  std::string scenario, out;
  std::size_t jobs = 1;
  std::vector<CLI::App*> subs;
  for (const char* name : {"verify", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name, std::string(name) == std::string("verify")
                                                 ? "run the checks of one scenario"
                                                 : "run the checks over the scenario's grid");
    sub->add_option("--scenario", scenario, "scenario JSON file")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "64-bit seed overriding the scenario");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }
  opts.scenario = scenario;
  opts.out = out;
  opts.jobs = jobs;
  for (CLI::App* sub : subs) {
    if (sub->parsed() && sub->count("--seed")) opts.seed = seed;
  }
  if (subs[0]->parsed()) return run_verify(opts, std::cout, std::cerr);
  return run_sweep(opts, std::cout, std::cerr);
}

}  // namespace frontlab::cli
