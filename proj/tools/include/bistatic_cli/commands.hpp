#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "bistatic_cli/config.hpp"

namespace bistatic::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitInfeasible = 3,
  kExitNonConvergence = 4,
  kExitValidation = 5,
};

inline constexpr const char* kOutDirEnv = "BISTATIC_OUT_DIR";

/// --out wins, then $BISTATIC_OUT_DIR, then output.directory.
std::string resolve_output_dir(const RunConfig& c, const std::optional<std::string>& cli_out);

/// Parses "X,Y" in meters.
Position2D parse_target(const std::string& text);

struct PointReport {
  Position2D target;
  OptResult result;
  double peb = 0.0;
  double re_b21_residual = 0.0;  // max |Re b21| / P_T
};

PointReport optimize_point(const RunConfig& c, const Position2D& target);
nlohmann::json to_json(const PointReport& r, const RunConfig& c);

MapResult run_map(const RunConfig& c, MapKind kind, bool full_res);
nlohmann::json map_metadata(const MapResult& m, const RunConfig& c, double elapsed_seconds);

/// Map exit status: success when at least 90% of cells are finite.
bool map_acceptable(const MapResult& m);

int cmd_optimize_point(const RunConfig& c, const std::string& target, const std::optional<std::string>& out_dir,
                       std::ostream& out, std::ostream& err);
int cmd_map(const RunConfig& c, const std::string& kind, const std::optional<std::string>& out_dir, bool full_res,
            std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream& err);

}  // namespace bistatic::cli
