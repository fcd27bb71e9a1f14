#include "frontlab/cli/scenario.hpp"

#include "frontlab/cli/checks.hpp"
#include "frontlab/error.hpp"
#include "frontlab/presets.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace frontlab::cli {
namespace {

[[noreturn]] void field_error(const std::string& source, const std::string& path,
                              const std::string& what) {
  throw ConfigError(source + ": field '" + path + "': " + what);
}

// Reads one JSON object, remembering which keys were consumed so that leftovers
// can be rejected.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string source, std::string path)
      : j_(j), source_(std::move(source)), path_(std::move(path)) {
    if (!j_.is_object()) field_error(source_, path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const Json& v = raw(key);
    if (!v.is_number()) field_error(source_, sub(key), "expected a number");
    return v.get<double>();
  }

  std::uint64_t unsigned_int(const std::string& key, std::optional<std::uint64_t> fallback) {
    if (!has(key)) return require(key, fallback);
    const Json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      field_error(source_, sub(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const Json& v = raw(key);
    if (!v.is_string()) field_error(source_, sub(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key,
                              std::optional<std::vector<double>> fallback = std::vector<double>{}) {
    if (!has(key)) return require(key, fallback);
    return as_numbers(raw(key), sub(key));
  }

  std::vector<std::vector<double>> rows(const std::string& key) {
    if (!has(key)) return {};
    const Json& v = raw(key);
    if (!v.is_array()) field_error(source_, sub(key), "expected an array of arrays");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_numbers(v[i], sub(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) field_error(source_, sub(key), "unknown field");
    }
  }

  const std::string& source() const { return source_; }

 private:
  template <class T>
  T require(const std::string& key, const std::optional<T>& fallback) {
    if (!fallback) field_error(source_, sub(key), "required field is missing");
    return *fallback;
  }

  std::vector<double> as_numbers(const Json& v, const std::string& path) const {
    if (!v.is_array()) field_error(source_, path, "expected an array of numbers");
    std::vector<double> out;
    for (const Json& e : v) {
      if (!e.is_number()) field_error(source_, path, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  const Json& j_;
  std::string source_;
  std::string path_;
  std::set<std::string> seen_;
};

const std::set<std::string> kModels{"burgers", "psystem", "linear"};
const std::set<std::string> kPresets{"shock", "rarefaction", "two_shock", "random_tv", "pieces"};

ModelSpec parse_model(ObjectReader& root) {
  ObjectReader r(root.raw("model"), root.source(), "model");
  ModelSpec m;
  m.id = r.string("id");
  if (!kModels.count(m.id)) field_error(r.source(), "model.id", "unknown model \"" + m.id + "\"");
  if (m.id == "psystem") m.gamma = r.number("gamma", 2.0);
  if (r.has("omega")) {
    ObjectReader o(r.raw("omega"), r.source(), "model.omega");
    m.lo = o.numbers("lo", std::nullopt);
    m.hi = o.numbers("hi", std::nullopt);
    o.finish();
    const std::size_t n = m.id == "burgers" ? 1 : 2;
    if (m.lo.size() != n || m.hi.size() != n) {
      field_error(r.source(), "model.omega", "bounds must have " + std::to_string(n) + " components");
    }
  }
  if (m.id == "linear") {
    m.matrix = r.rows("matrix");
    if (m.matrix.size() != 2 || m.matrix[0].size() != 2 || m.matrix[1].size() != 2) {
      field_error(r.source(), "model.matrix", "expected a 2x2 matrix");
    }
  }
  r.finish();
  return m;
}

InitialSpec parse_initial(ObjectReader& root) {
  ObjectReader r(root.raw("initial"), root.source(), "initial");
  InitialSpec s;
  s.preset = r.string("preset");
  if (!kPresets.count(s.preset)) {
    field_error(r.source(), "initial.preset", "unknown preset \"" + s.preset + "\"");
  }
  if (s.preset == "shock" || s.preset == "rarefaction") {
    s.left = r.numbers("left", std::nullopt);
    s.right = r.numbers("right", std::nullopt);
    s.x = r.number("x", 0.0);
  } else if (s.preset == "two_shock") {
    s.left = r.numbers("left", std::nullopt);
    s.middle = r.numbers("middle", std::nullopt);
    s.right = r.numbers("right", std::nullopt);
    s.x1 = r.number("x1", 0.0);
    s.x2 = r.number("x2", 0.5);
  } else if (s.preset == "random_tv") {
    if (r.has("seed")) s.seed = r.unsigned_int("seed", std::nullopt);
    s.tv_budget = r.number("tv_budget", 0.1);
    s.jumps = r.unsigned_int("jumps", 5);
    s.x_lo = r.number("x_lo", -0.5);
    s.x_hi = r.number("x_hi", 0.5);
  } else {
    s.breakpoints = r.numbers("breakpoints", std::nullopt);
    s.values = r.rows("values");
    if (s.values.size() != s.breakpoints.size() + 1) {
      field_error(r.source(), "initial.values", "need one more value than breakpoints");
    }
  }
  r.finish();
  return s;
}

// Overlay user parameters on the registry defaults, type by type.
Json merge_params(const CheckDef& def, const Json& given, const std::string& source,
                  const std::string& path) {
  Json out = def.defaults;
  if (given.is_null()) return out;
  if (!given.is_object()) field_error(source, path, "expected an object");
  for (const auto& [key, value] : given.items()) {
    if (!out.contains(key)) field_error(source, path + "." + key, "unknown parameter of " + def.name);
    const Json& d = out[key];
    const bool ok = (d.is_number() && value.is_number()) || (d.is_string() && value.is_string()) ||
                    (d.is_boolean() && value.is_boolean()) ||
                    (d.is_array() && value.is_array() &&
                     std::all_of(value.begin(), value.end(), [](const Json& e) { return e.is_number(); }));
    if (!ok) field_error(source, path + "." + key, "wrong type, expected " + std::string(d.type_name()));
    out[key] = value;
  }
  return out;
}

std::vector<CheckSpec> parse_checks(ObjectReader& root) {
  std::vector<CheckSpec> out;
  if (!root.has("checks")) return out;
  const Json& list = root.raw("checks");
  if (!list.is_array()) field_error(root.source(), "checks", "expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "checks[" + std::to_string(i) + "]";
    ObjectReader r(list[i], root.source(), path);
    CheckSpec c;
    c.name = r.string("name");
    const CheckDef* def = find_check(c.name);
    if (!def) field_error(r.source(), path + ".name", "unknown check \"" + c.name + "\"");
    c.params = merge_params(*def, r.has("params") ? r.raw("params") : Json(), r.source(),
                            path + ".params");
    r.finish();
    out.push_back(std::move(c));
  }
  return out;
}

std::optional<GridSpec> parse_grid(ObjectReader& root) {
  if (!root.has("grid")) return std::nullopt;
  ObjectReader r(root.raw("grid"), root.source(), "grid");
  GridSpec g;
  g.eps_grid = r.numbers("eps_grid");
  g.seeds = r.unsigned_int("seeds", 0);
  g.scheme = r.string("scheme", "godunov");
  g.delta_ref = r.number("delta_ref", 1e-3);
  r.finish();
  if (g.eps_grid.empty() == (g.seeds == 0)) {
    field_error(r.source(), "grid", "give exactly one of eps_grid or seeds");
  }
  if (g.scheme != "godunov" && g.scheme != "front_tracking") {
    field_error(r.source(), "grid.scheme", "unknown scheme \"" + g.scheme + "\"");
  }
  return g;
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

Json vec(const std::vector<double>& v) { return Json(v); }

State to_state(const std::vector<double>& v, int dim, const std::string& what) {
  if (static_cast<int>(v.size()) != dim) {
    throw ConfigError(what + " has " + std::to_string(v.size()) + " components, model needs " +
                      std::to_string(dim));
  }
  State s(dim);
  for (int i = 0; i < dim; ++i) s(i) = v[static_cast<std::size_t>(i)];
  return s;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(source + ":" + line_column(text, e.byte == 0 ? 0 : e.byte - 1) +
                      ": JSON syntax error: " + e.what());
  }
  ObjectReader r(j, source, "");
  const auto schema = r.unsigned_int("schema", std::nullopt);
  if (schema != kSchemaVersion) {
    field_error(source, "schema", "unsupported version " + std::to_string(schema));
  }
  Scenario s;
  s.name = r.string("name", "scenario");
  s.model = parse_model(r);
  s.initial = parse_initial(r);
  s.horizon = r.number("horizon", 1.0);
  s.delta = r.number("delta", 0.01);
  s.eps = r.number("eps", 0.01);
  s.support_radius = r.number("support_radius", 3.0);
  s.seed = r.unsigned_int("seed", 0);
  s.snapshot_times = r.numbers("snapshot_times");
  s.checks = parse_checks(r);
  s.grid = parse_grid(r);
  s.output = r.string("output", "");
  r.finish();
  if (!(s.horizon > 0.0)) field_error(source, "horizon", "must be positive");
  if (!(s.delta > 0.0)) field_error(source, "delta", "must be positive");
  if (!(s.eps > 0.0)) field_error(source, "eps", "must be positive");
  for (double t : s.snapshot_times) {
    if (t < 0.0 || t > s.horizon) field_error(source, "snapshot_times", "times must lie in [0, horizon]");
  }
  // Build once so that inconsistent model/datum pairs fail at parse time.
  const ModelPtr m = build_model(s.model);
  build_initial(*m, s.initial, s.seed);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

Json emit_scenario(const Scenario& s) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["name"] = s.name;
  Json m;
  m["id"] = s.model.id;
  if (s.model.id == "psystem") m["gamma"] = s.model.gamma;
  if (!s.model.lo.empty()) m["omega"] = Json{{"lo", vec(s.model.lo)}, {"hi", vec(s.model.hi)}};
  if (s.model.id == "linear") m["matrix"] = s.model.matrix;
  j["model"] = m;

  const InitialSpec& in = s.initial;
  Json i;
  i["preset"] = in.preset;
  if (in.preset == "shock" || in.preset == "rarefaction") {
    i["left"] = vec(in.left);
    i["right"] = vec(in.right);
    i["x"] = in.x;
  } else if (in.preset == "two_shock") {
    i["left"] = vec(in.left);
    i["middle"] = vec(in.middle);
    i["right"] = vec(in.right);
    i["x1"] = in.x1;
    i["x2"] = in.x2;
  } else if (in.preset == "random_tv") {
    if (in.seed) i["seed"] = *in.seed;
    i["tv_budget"] = in.tv_budget;
    i["jumps"] = in.jumps;
    i["x_lo"] = in.x_lo;
    i["x_hi"] = in.x_hi;
  } else {
    i["breakpoints"] = vec(in.breakpoints);
    i["values"] = in.values;
  }
  j["initial"] = i;
  j["horizon"] = s.horizon;
  j["delta"] = s.delta;
  j["eps"] = s.eps;
  j["support_radius"] = s.support_radius;
  j["seed"] = s.seed;
  j["snapshot_times"] = vec(s.snapshot_times);
  Json checks = Json::array();
  for (const CheckSpec& c : s.checks) checks.push_back(Json{{"name", c.name}, {"params", c.params}});
  j["checks"] = checks;
  if (s.grid) {
    Json g;
    if (!s.grid->eps_grid.empty()) g["eps_grid"] = vec(s.grid->eps_grid);
    if (s.grid->seeds) g["seeds"] = s.grid->seeds;
    g["scheme"] = s.grid->scheme;
    g["delta_ref"] = s.grid->delta_ref;
    j["grid"] = g;
  }
  j["output"] = s.output;
  return j;
}

ModelPtr build_model(const ModelSpec& spec) {
  if (spec.id == "burgers") {
    if (spec.lo.empty()) return make_burgers();
    return make_burgers(spec.lo[0], spec.hi[0]);
  }
  if (spec.id == "psystem") {
    if (spec.lo.empty()) return make_psystem(spec.gamma);
    return make_psystem(spec.gamma, pair_state(spec.lo[0], spec.lo[1]),
                        pair_state(spec.hi[0], spec.hi[1]));
  }
  if (spec.id == "linear") {
    Matrix a(2, 2);
    a << spec.matrix[0][0], spec.matrix[0][1], spec.matrix[1][0], spec.matrix[1][1];
    if (spec.lo.empty()) return make_linear(a);
    return make_linear(a, pair_state(spec.lo[0], spec.lo[1]), pair_state(spec.hi[0], spec.hi[1]));
  }
  throw ConfigError("unknown model \"" + spec.id + "\"");
}

PiecewiseConstantFn build_initial(const SystemModel& model, const InitialSpec& spec,
                                  std::uint64_t run_seed) {
  const int n = model.dim();
  PiecewiseConstantFn u;
  try {
    if (spec.preset == "shock" || spec.preset == "rarefaction") {
      u = preset_shock(to_state(spec.left, n, "initial.left"), to_state(spec.right, n, "initial.right"),
                       spec.x);
    } else if (spec.preset == "two_shock") {
      if (!(spec.x1 < spec.x2)) throw ConfigError("initial: need x1 < x2");
      u = preset_two_shock(to_state(spec.left, n, "initial.left"),
                           to_state(spec.middle, n, "initial.middle"),
                           to_state(spec.right, n, "initial.right"), spec.x1, spec.x2);
    } else if (spec.preset == "random_tv") {
      u = preset_random_tv(model, spec.seed.value_or(run_seed), spec.tv_budget, spec.jumps,
                           spec.x_lo, spec.x_hi);
    } else if (spec.preset == "pieces") {
      std::vector<State> vs;
      for (std::size_t k = 0; k < spec.values.size(); ++k) {
        vs.push_back(to_state(spec.values[k], n, "initial.values[" + std::to_string(k) + "]"));
      }
      if (!std::is_sorted(spec.breakpoints.begin(), spec.breakpoints.end())) {
        throw ConfigError("initial.breakpoints must be increasing");
      }
      u = PiecewiseConstantFn(spec.breakpoints, vs);
    } else {
      throw ConfigError("unknown preset \"" + spec.preset + "\"");
    }
    for (const State& v : u.values()) model.require_in_domain(v, "initial datum");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("initial datum: ") + e.what());
  }
  return u;
}

}  // namespace frontlab::cli
