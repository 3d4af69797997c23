#include "bistatic_cli/commands.hpp"

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "bistatic/errors.hpp"
#include "bistatic/fisher.hpp"
#include "bistatic/version.hpp"
#include "bistatic_cli/validate.hpp"

namespace bistatic::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json versions() {
  return {
      {"bistatic", BISTATIC_VERSION},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
      {"compiler", __VERSION__},
  };
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Shared error-to-exit-code mapping for all subcommands.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArray& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DegenerateGeometry& e) {
    err << "degenerate geometry: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InfeasibleScenario& e) {
    err << "infeasible scenario: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const SingularEFIM& e) {
    err << "singular information matrix: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

std::string resolve_output_dir(const RunConfig& c, const std::optional<std::string>& cli_out) {
  if (cli_out && !cli_out->empty()) return *cli_out;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return c.output.directory;
}

Position2D parse_target(const std::string& text) {
  std::istringstream in(text);
  double x = 0.0;
  double y = 0.0;
  char comma = 0;
  if (!(in >> x >> comma >> y) || comma != ',' || !(in >> std::ws).eof() || !std::isfinite(x) || !std::isfinite(y)) {
    throw ConfigError("target must be given as X,Y in meters, got '" + text + "'");
  }
  return {x, y};
}

PointReport optimize_point(const RunConfig& c, const Position2D& target) {
  const Scenario s = with_target(to_scenario(c.scenario), target);
  const SensingModel m = build_sensing_model(s);
  PointReport r;
  r.target = target;
  r.result = optimize(m, to_options(c.solver));
  r.peb = std::sqrt(r.result.speb);
  for (const auto& b : r.result.B_opt.blocks) {
    r.re_b21_residual = std::max(r.re_b21_residual, std::abs(b(1, 0).real()) / m.power_budget);
  }
  return r;
}

json to_json(const PointReport& r, const RunConfig& c) {
  json blocks = json::array();
  for (const auto& b : r.result.B_opt.blocks) {
    json re = json::array();
    json im = json::array();
    for (int i = 0; i < 2; ++i) {
      re.push_back({b(i, 0).real(), b(i, 1).real()});
      im.push_back({b(i, 0).imag(), b(i, 1).imag()});
    }
    blocks.push_back({{"real", re}, {"imag", im}});
  }
  return {
      {"schema_version", kSchemaVersion},
      {"kind", "optimize-point"},
      {"target_m", {r.target.x, r.target.y}},
      {"peb_m", r.peb},
      {"speb_m2", r.result.speb},
      {"power_share", r.result.power_share_toward_target},
      {"rank_profile", r.result.rank_profile},
      {"re_b21_residual", r.re_b21_residual},
      {"iterations", r.result.iterations},
      {"kkt_residual", r.result.kkt_residual},
      {"converged", r.result.converged},
      {"beam_covariance", blocks},
      {"config", to_json(c)},
      {"versions", versions()},
  };
}

MapResult run_map(const RunConfig& c, MapKind kind, bool full_res) {
  const Scenario s = to_scenario(c.scenario);
  const GridSpec g = to_grid(c.grid, full_res);
  const OptOptions o = to_options(c.solver);
  const SweepOptions w = to_sweep_options(c.solver);
  switch (kind) {
    case MapKind::Peb: return peb_map(s, g, o, w);
    case MapKind::PowerShare: return power_share_map(s, g, o, w);
    case MapKind::Role: return role_map(s, reversed(s), g, o, w);
  }
  throw ConfigError("unknown map kind");
}

json map_metadata(const MapResult& m, const RunConfig& c, double elapsed_seconds) {
  long long iterations = 0;
  double max_kkt = 0.0;
  for (const auto& cell : m.cells) {
    iterations += cell.iterations;
    if (cell.status == CellStatus::Ok) max_kkt = std::max(max_kkt, cell.kkt_residual);
  }
  json status = json::object();
  for (auto s : {CellStatus::Ok, CellStatus::ExcludedGeometry, CellStatus::SingularEfim, CellStatus::NonConvergence}) {
    status[to_string(s)] = m.count(s);
  }
  json meta = {
      {"schema_version", kSchemaVersion},
      {"kind", to_string(m.kind)},
      {"timestamp_utc", utc_timestamp()},
      {"grid",
       {{"x_min_m", m.grid.x_min},
        {"x_max_m", m.grid.x_max},
        {"y_min_m", m.grid.y_min},
        {"y_max_m", m.grid.y_max},
        {"nx", m.grid.nx},
        {"ny", m.grid.ny},
        {"exclusion_radius_m", m.grid.exclusion_radius},
        {"baseline_band_m", m.grid.baseline_band}}},
      {"cells", m.cells.size()},
      {"finite_cells", m.finite_count()},
      {"status_counts", status},
      {"kkt_threshold", m.kkt_threshold},
      {"max_kkt_residual", max_kkt},
      {"total_iterations", iterations},
      {"elapsed_seconds", elapsed_seconds},
      {"config", to_json(c)},
      {"versions", versions()},
  };
  if (m.kind == MapKind::Role) {
    meta["role_counts"] = {{"forward", m.count(RoleFlag::Forward)},
                           {"reverse", m.count(RoleFlag::Reverse)},
                           {"tie", m.count(RoleFlag::Tie)}};
  }
  return meta;
}

bool map_acceptable(const MapResult& m) {
  return !m.cells.empty() && 10 * m.finite_count() >= 9 * static_cast<int>(m.cells.size());
}

int cmd_optimize_point(const RunConfig& c, const std::string& target, const std::optional<std::string>& out_dir,
                       std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const PointReport r = optimize_point(c, parse_target(target));
    std::ostringstream ranks;
    for (std::size_t i = 0; i < r.result.rank_profile.size(); ++i) ranks << (i ? " " : "") << r.result.rank_profile[i];

    out << std::setprecision(10);
    out << "target          (" << r.target.x << ", " << r.target.y << ") m\n";
    out << "peb             " << r.peb << " m\n";
    out << "speb            " << r.result.speb << " m^2\n";
    out << "power share     " << r.result.power_share_toward_target << "\n";
    out << "rank profile    " << ranks.str() << "\n";
    out << "max |Re b21|    " << r.re_b21_residual << " P_T\n";
    out << "iterations      " << r.result.iterations << "\n";
    out << "kkt residual    " << r.result.kkt_residual << "\n";
    out << "converged       " << (r.result.converged ? "true" : "false") << "\n";

    if (c.output.wants("json")) {
      const fs::path dir = prepare_dir(resolve_output_dir(c, out_dir));
      write_text(dir / "optimize_point.json", to_json(r, c).dump(2) + "\n");
      out << "wrote           " << (dir / "optimize_point.json").string() << "\n";
    }
    if (!r.result.converged) {
      err << "optimizer did not converge\n";
      return static_cast<int>(kExitNonConvergence);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_map(const RunConfig& c, const std::string& kind_name, const std::optional<std::string>& out_dir,
            bool full_res, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    MapKind kind;
    if (kind_name == "peb") {
      kind = MapKind::Peb;
    } else if (kind_name == "power") {
      kind = MapKind::PowerShare;
    } else if (kind_name == "role") {
      kind = MapKind::Role;
    } else {
      throw ConfigError("unknown map kind '" + kind_name + "' (expected peb, power or role)");
    }

    const auto t0 = std::chrono::steady_clock::now();
    const MapResult m = run_map(c, kind, full_res);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir = prepare_dir(resolve_output_dir(c, out_dir));
    const std::string stem = kind_name + "_map";
    if (c.output.wants("csv")) {
      std::ofstream csv(dir / (stem + ".csv"));
      if (!csv) throw std::runtime_error("cannot write " + (dir / (stem + ".csv")).string());
      write_map_csv(m, csv);
    }
    if (c.output.wants("json")) write_text(dir / (stem + ".json"), map_metadata(m, c, elapsed).dump(2) + "\n");

    out << kind_name << " map " << m.grid.nx << "x" << m.grid.ny << ": " << m.finite_count() << "/" << m.cells.size()
        << " finite cells";
    for (auto s : {CellStatus::ExcludedGeometry, CellStatus::SingularEfim, CellStatus::NonConvergence}) {
      if (m.count(s)) out << ", " << m.count(s) << " " << to_string(s);
    }
    out << " (" << std::setprecision(3) << elapsed << " s) -> " << dir.string() << "\n";
    if (!map_acceptable(m)) {
      err << "fewer than 90% of cells are finite\n";
      return static_cast<int>(kExitNonConvergence);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ValidationReport r =
        run_validation(to_scenario(c.scenario), to_grid(c.grid), to_options(c.solver));
    print_scoreboard(r, out);
    return static_cast<int>(r.passed() ? kExitOk : kExitValidation);
  });
}

}  // namespace bistatic::cli
