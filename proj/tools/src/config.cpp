#include "bistatic_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "bistatic/constants.hpp"
#include "bistatic/errors.hpp"

namespace bistatic::cli {

using nlohmann::json;

namespace {

// Reads one object section and remembers which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    out = convert<T>(*it, key);
  }

  template <typename T>
  void read(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    out = convert<T>(*it, key);
  }

  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    return Section(*it, path_.empty() ? key : path_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + qualified(key.c_str()) + "'");
    }
  }

  std::string qualified(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  template <typename T>
  T convert(const json& v, const char* key) const {
    const std::string where = qualified(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
      const auto x = v.get<long long>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        throw ConfigError(where + ": integer out of range");
      }
      return static_cast<int>(x);
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(where + ": expected a number");
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw ConfigError(where + ": expected a finite number");
      return x;
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where + ": expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::array<double, 2>>) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError(where + ": expected [x, y]");
      }
      return {v[0].get<double>(), v[1].get<double>()};
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
      std::vector<double> out;
      for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(where + ": expected an array of numbers");
        out.push_back(e.get<double>());
      }
      return out;
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      if (!v.is_array()) throw ConfigError(where + ": expected an array of strings");
      std::vector<std::string> out;
      for (const auto& e : v) {
        if (!e.is_string()) throw ConfigError(where + ": expected an array of strings");
        out.push_back(e.get<std::string>());
      }
      return out;
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void check(const RunConfig& c) {
  const ScenarioConfig& s = c.scenario;
  require(s.carrier_hz > 0.0, "scenario.carrier_hz must be positive");
  require(s.subcarriers >= 1, "scenario.subcarriers must be at least 1");
  require(s.subcarrier_spacing_hz > 0.0, "scenario.subcarrier_spacing_hz must be positive");
  if (s.subcarrier_offsets_hz) {
    const auto& v = *s.subcarrier_offsets_hz;
    require(!v.empty(), "scenario.subcarrier_offsets_hz must not be empty");
    require(std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end(),
            "scenario.subcarrier_offsets_hz must be strictly ascending");
  }
  require(s.tx_elements >= 1, "scenario.tx_elements must be at least 1");
  require(s.rx_elements >= 1, "scenario.rx_elements must be at least 1");
  require(!s.element_spacing_m || *s.element_spacing_m > 0.0, "scenario.element_spacing_m must be positive");
  require(s.noise_variance_watts > 0.0, "scenario.noise_variance_watts must be positive");
  require(s.power_budget_watts > 0.0, "scenario.power_budget_watts must be positive");
  require(s.rcs_coefficient_m > 0.0, "scenario.rcs_coefficient_m must be positive");
  require(!s.channel_gain_magnitude || *s.channel_gain_magnitude > 0.0,
          "scenario.channel_gain_magnitude must be positive");

  const GridConfig& g = c.grid;
  require(g.x_min_m < g.x_max_m && g.y_min_m < g.y_max_m, "grid bounds must be ordered");
  require(g.nx >= 2 && g.ny >= 2 && g.full_res_nx >= 2 && g.full_res_ny >= 2, "grid counts must be at least 2");
  require(g.exclusion_radius_m >= 0.0 && g.baseline_band_m >= 0.0, "grid exclusion sizes must be non-negative");

  require(c.solver.threads >= 1, "solver.threads must be at least 1");
  require(c.solver.tie_tolerance >= 0.0, "solver.tie_tolerance must be non-negative");
  try {
    validate(to_options(c.solver));
  } catch (const Error& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }

  require(!c.output.directory.empty(), "output.directory must not be empty");
  for (const auto& f : c.output.formats) {
    require(f == "csv" || f == "json", "output.formats: unknown format '" + f + "'");
  }
}

}  // namespace

bool OutputConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  Section root(j, "");
  int schema = kSchemaVersion;
  root.read("schema_version", schema);
  if (schema != kSchemaVersion) throw ConfigError("unsupported schema_version " + std::to_string(schema));

  if (auto s = root.child("scenario")) {
    ScenarioConfig& o = c.scenario;
    s->read("tx_position_m", o.tx_position_m);
    s->read("rx_position_m", o.rx_position_m);
    s->read("carrier_hz", o.carrier_hz);
    s->read("subcarriers", o.subcarriers);
    s->read("subcarrier_spacing_hz", o.subcarrier_spacing_hz);
    s->read("subcarrier_offsets_hz", o.subcarrier_offsets_hz);
    s->read("tx_elements", o.tx_elements);
    s->read("rx_elements", o.rx_elements);
    s->read("element_spacing_m", o.element_spacing_m);
    s->read("tx_orientation_rad", o.tx_orientation_rad);
    s->read("rx_orientation_rad", o.rx_orientation_rad);
    s->read("noise_variance_watts", o.noise_variance_watts);
    s->read("power_budget_watts", o.power_budget_watts);
    s->read("rcs_coefficient_m", o.rcs_coefficient_m);
    s->read("channel_phase_rad", o.channel_phase_rad);
    s->read("channel_gain_magnitude", o.channel_gain_magnitude);
    s->read("narrowband", o.narrowband);
    s->read("symmetric_subcarriers", o.symmetric_subcarriers);
    s->finish();
  }
  if (auto s = root.child("grid")) {
    GridConfig& o = c.grid;
    s->read("x_min_m", o.x_min_m);
    s->read("x_max_m", o.x_max_m);
    s->read("y_min_m", o.y_min_m);
    s->read("y_max_m", o.y_max_m);
    s->read("nx", o.nx);
    s->read("ny", o.ny);
    s->read("full_res_nx", o.full_res_nx);
    s->read("full_res_ny", o.full_res_ny);
    s->read("exclusion_radius_m", o.exclusion_radius_m);
    s->read("baseline_band_m", o.baseline_band_m);
    s->finish();
  }
  if (auto s = root.child("solver")) {
    SolverConfig& o = c.solver;
    s->read("max_iters", o.max_iters);
    s->read("step_init", o.step_init);
    s->read("armijo_shrink", o.armijo_shrink);
    s->read("armijo_sufficient_decrease", o.armijo_sufficient_decrease);
    s->read("grad_tol", o.grad_tol);
    s->read("stall_tol", o.stall_tol);
    s->read("psd_tol", o.psd_tol);
    s->read("rank_tol", o.rank_tol);
    s->read("warm_start", o.warm_start);
    s->read("threads", o.threads);
    s->read("tie_tolerance", o.tie_tolerance);
    s->finish();
  }
  if (auto s = root.child("output")) {
    s->read("directory", c.output.directory);
    s->read("formats", c.output.formats);
    s->finish();
  }
  root.finish();
  check(c);
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

json to_json(const RunConfig& c) {
  const ScenarioConfig& s = c.scenario;
  json sc = {
      {"tx_position_m", s.tx_position_m},
      {"rx_position_m", s.rx_position_m},
      {"carrier_hz", s.carrier_hz},
      {"subcarriers", s.subcarriers},
      {"subcarrier_spacing_hz", s.subcarrier_spacing_hz},
      {"tx_elements", s.tx_elements},
      {"rx_elements", s.rx_elements},
      {"tx_orientation_rad", s.tx_orientation_rad},
      {"rx_orientation_rad", s.rx_orientation_rad},
      {"noise_variance_watts", s.noise_variance_watts},
      {"power_budget_watts", s.power_budget_watts},
      {"rcs_coefficient_m", s.rcs_coefficient_m},
      {"channel_phase_rad", s.channel_phase_rad},
      {"narrowband", s.narrowband},
      {"symmetric_subcarriers", s.symmetric_subcarriers},
  };
  if (s.subcarrier_offsets_hz) sc["subcarrier_offsets_hz"] = *s.subcarrier_offsets_hz;
  if (s.element_spacing_m) sc["element_spacing_m"] = *s.element_spacing_m;
  if (s.channel_gain_magnitude) sc["channel_gain_magnitude"] = *s.channel_gain_magnitude;

  const GridConfig& g = c.grid;
  const SolverConfig& o = c.solver;
  return {
      {"schema_version", kSchemaVersion},
      {"scenario", sc},
      {"grid",
       {{"x_min_m", g.x_min_m},
        {"x_max_m", g.x_max_m},
        {"y_min_m", g.y_min_m},
        {"y_max_m", g.y_max_m},
        {"nx", g.nx},
        {"ny", g.ny},
        {"full_res_nx", g.full_res_nx},
        {"full_res_ny", g.full_res_ny},
        {"exclusion_radius_m", g.exclusion_radius_m},
        {"baseline_band_m", g.baseline_band_m}}},
      {"solver",
       {{"max_iters", o.max_iters},
        {"step_init", o.step_init},
        {"armijo_shrink", o.armijo_shrink},
        {"armijo_sufficient_decrease", o.armijo_sufficient_decrease},
        {"grad_tol", o.grad_tol},
        {"stall_tol", o.stall_tol},
        {"psd_tol", o.psd_tol},
        {"rank_tol", o.rank_tol},
        {"warm_start", o.warm_start},
        {"threads", o.threads},
        {"tie_tolerance", o.tie_tolerance}}},
      {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}},
  };
}

std::string dump_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

Scenario to_scenario(const ScenarioConfig& c) {
  Scenario s;
  s.tx_position = {c.tx_position_m[0], c.tx_position_m[1]};
  s.rx_position = {c.rx_position_m[0], c.rx_position_m[1]};
  s.omega_carrier = kTwoPi * c.carrier_hz;
  const double spacing = c.element_spacing_m ? *c.element_spacing_m : kSpeedOfLight / c.carrier_hz / 2.0;
  s.tx_array = build_uca(c.tx_elements, spacing, c.tx_orientation_rad);
  s.rx_array = build_uca(c.rx_elements, spacing, c.rx_orientation_rad);
  if (c.subcarrier_offsets_hz) {
    for (double f : *c.subcarrier_offsets_hz) s.subcarrier_offsets.push_back(kTwoPi * f);
  } else {
    s.subcarrier_offsets = subcarrier_grid(c.subcarriers, c.subcarrier_spacing_hz);
  }
  s.noise_variance = c.noise_variance_watts;
  s.power_budget = c.power_budget_watts;
  s.gain.rcs_coefficient = c.rcs_coefficient_m;
  s.gain.phase = c.channel_phase_rad;
  s.gain.fixed_magnitude = c.channel_gain_magnitude;
  s.narrowband = c.narrowband;
  s.symmetric_subcarriers = c.symmetric_subcarriers;
  return s;
}

GridSpec to_grid(const GridConfig& c, bool full_res) {
  GridSpec g;
  g.x_min = c.x_min_m;
  g.x_max = c.x_max_m;
  g.y_min = c.y_min_m;
  g.y_max = c.y_max_m;
  g.nx = full_res ? c.full_res_nx : c.nx;
  g.ny = full_res ? c.full_res_ny : c.ny;
  g.exclusion_radius = c.exclusion_radius_m;
  g.baseline_band = c.baseline_band_m;
  return g;
}

OptOptions to_options(const SolverConfig& c) {
  OptOptions o;
  o.max_iters = c.max_iters;
  o.step_init = c.step_init;
  o.armijo_shrink = c.armijo_shrink;
  o.armijo_sufficient_decrease = c.armijo_sufficient_decrease;
  o.grad_tol = c.grad_tol;
  o.stall_tol = c.stall_tol;
  o.psd_tol = c.psd_tol;
  o.rank_tol = c.rank_tol;
  return o;
}

SweepOptions to_sweep_options(const SolverConfig& c) {
  SweepOptions o;
  o.warm_start = c.warm_start;
  o.threads = c.threads;
  o.tie_tolerance = c.tie_tolerance;
  return o;
}

}  // namespace bistatic::cli
