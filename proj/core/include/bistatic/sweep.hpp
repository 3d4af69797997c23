#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bistatic/beamform.hpp"
#include "bistatic/scenario.hpp"

namespace bistatic {

struct GridSpec {
  double x_min = -40.0;  // m
  double x_max = 40.0;
  double y_min = -40.0;
  double y_max = 40.0;
  int nx = 41;
  int ny = 41;
  double exclusion_radius = 0.5;  // m around each node
  double baseline_band = 0.05;    // m around the segment between the nodes

  double x_at(int ix) const;
  double y_at(int iy) const;
};

void validate(const GridSpec& g);

enum class CellStatus { Ok, ExcludedGeometry, SingularEfim, NonConvergence };
enum class RoleFlag { None, Forward, Reverse, Tie };

const char* to_string(CellStatus s);
const char* to_string(RoleFlag r);

struct CellResult {
  double x = 0.0;
  double y = 0.0;
  double peb = 0.0;          // NaN unless status == Ok
  double power_share = 0.0;  // NaN unless status == Ok
  bool rank1_optimal = false;
  RoleFlag role = RoleFlag::None;
  CellStatus status = CellStatus::Ok;
  int iterations = 0;
  double kkt_residual = 0.0;
  std::vector<int> ranks;
};

enum class MapKind { Peb, PowerShare, Role };
const char* to_string(MapKind k);

struct MapResult {
  MapKind kind = MapKind::Peb;
  GridSpec grid;
  std::vector<CellResult> cells;  // row-major: index = iy * nx + ix
  double kkt_threshold = 0.0;

  const CellResult& at(int ix, int iy) const { return cells[static_cast<std::size_t>(iy) * grid.nx + ix]; }
  int finite_count() const;
  int count(CellStatus s) const;
  int count(RoleFlag r) const;
};

struct SweepOptions {
  /// Start each cell from the previous optimum along its row.
  bool warm_start = true;
  /// Worker threads over rows; output order is fixed regardless.
  int threads = 1;
  /// Relative SPEB difference below which both link directions tie.
  double tie_tolerance = 1e-9;
};

/// True when `p` lies within the exclusion zones of the grid.
bool excluded(const Scenario& s, const GridSpec& g, const Position2D& p);

/// Optimizes every grid cell and reports PEB, power share and rank regions.
MapResult peb_map(const Scenario& base, const GridSpec& grid, const OptOptions& opts = {}, const SweepOptions& sweep = {});

/// Same sweep as peb_map, labelled as a power-share map.
MapResult power_share_map(const Scenario& base, const GridSpec& grid, const OptOptions& opts = {},
                          const SweepOptions& sweep = {});

/// Optimizes both link directions per cell and flags the better one.
/// PEB, share and rank fields describe the better direction.
MapResult role_map(const Scenario& forward, const Scenario& reverse, const GridSpec& grid, const OptOptions& opts = {},
                   SweepOptions sweep = {});

/// CSV with header x,y,peb,power_share,rank1,role_flag,status; 17 significant digits.
void write_map_csv(const MapResult& map, std::ostream& out);

}  // namespace bistatic
