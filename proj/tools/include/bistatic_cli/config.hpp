#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bistatic/beamform.hpp"
#include "bistatic/scenario.hpp"
#include "bistatic/sweep.hpp"

namespace bistatic::cli {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::array<double, 2> tx_position_m{-10.0, 0.0};
  std::array<double, 2> rx_position_m{10.0, 0.0};
  double carrier_hz = 3.8e9;
  int subcarriers = 2;
  double subcarrier_spacing_hz = 2.4e6;
  /// Explicit baseband offsets; replaces subcarriers/subcarrier_spacing_hz when set.
  std::optional<std::vector<double>> subcarrier_offsets_hz;
  int tx_elements = 15;
  int rx_elements = 3;
  /// Adjacent-element spacing; half a carrier wavelength when unset.
  std::optional<double> element_spacing_m;
  double tx_orientation_rad = 0.0;
  double rx_orientation_rad = 0.0;
  double noise_variance_watts = 2.4e-14;
  double power_budget_watts = 10e-3;
  double rcs_coefficient_m = 0.1;
  double channel_phase_rad = 0.0;
  /// Fixed |h1| instead of the path-loss model.
  std::optional<double> channel_gain_magnitude;
  bool narrowband = true;
  bool symmetric_subcarriers = true;

  bool operator==(const ScenarioConfig&) const = default;
};

struct GridConfig {
  double x_min_m = -40.0;
  double x_max_m = 40.0;
  double y_min_m = -40.0;
  double y_max_m = 40.0;
  int nx = 41;
  int ny = 41;
  int full_res_nx = 161;
  int full_res_ny = 161;
  double exclusion_radius_m = 0.5;
  double baseline_band_m = 0.05;

  bool operator==(const GridConfig&) const = default;
};

struct SolverConfig {
  int max_iters = 5000;
  double step_init = 0.0;
  double armijo_shrink = 0.5;
  double armijo_sufficient_decrease = 1e-4;
  double grad_tol = 1e-7;
  double stall_tol = 1e-6;
  double psd_tol = 1e-10;
  double rank_tol = 1e-4;
  bool warm_start = true;
  int threads = 1;
  double tie_tolerance = 1e-9;

  bool operator==(const SolverConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};

  bool operator==(const OutputConfig&) const = default;
  bool wants(const std::string& format) const;
};

struct RunConfig {
  ScenarioConfig scenario;
  GridConfig grid;
  SolverConfig solver;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;
};

/// Strict parse: unknown keys, wrong types and out-of-range values throw ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& c);
std::string dump_config(const RunConfig& c);

Scenario to_scenario(const ScenarioConfig& c);
GridSpec to_grid(const GridConfig& c, bool full_res = false);
OptOptions to_options(const SolverConfig& c);
SweepOptions to_sweep_options(const SolverConfig& c);

}  // namespace bistatic::cli
