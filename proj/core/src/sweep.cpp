#include "bistatic/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "bistatic/errors.hpp"
#include "bistatic/fisher.hpp"

namespace bistatic {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double distance_to_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

struct CellOutcome {
  CellResult cell;
  std::optional<BeamCovariance> B;
  double speb = kNaN;
};

CellOutcome solve_cell(const Scenario& base, const GridSpec& grid, const OptOptions& opts, double x, double y,
                       const std::optional<BeamCovariance>& warm) {
  CellOutcome out;
  CellResult& c = out.cell;
  c.x = x;
  c.y = y;
  c.peb = kNaN;
  c.power_share = kNaN;
  const Position2D p{x, y};
  if (excluded(base, grid, p)) {
    c.status = CellStatus::ExcludedGeometry;
    return out;
  }
  try {
    const SensingModel m = build_sensing_model(with_target(base, p));
    const OptResult r = optimize(m, opts, warm);
    c.iterations = r.iterations;
    c.kkt_residual = r.kkt_residual;
    c.ranks = r.rank_profile;
    if (!r.converged) {
      c.status = CellStatus::NonConvergence;
      return out;
    }
    c.peb = std::sqrt(r.speb);
    c.power_share = r.power_share_toward_target;
    c.rank1_optimal = *std::max_element(r.rank_profile.begin(), r.rank_profile.end()) == 1;
    out.B = r.B_opt;
    out.speb = r.speb;
  } catch (const DegenerateGeometry&) {
    c.status = CellStatus::ExcludedGeometry;
  } catch (const SingularEFIM&) {
    c.status = CellStatus::SingularEfim;
  } catch (const InfeasibleScenario&) {
    c.status = CellStatus::SingularEfim;
  }
  return out;
}

// Runs `row_fn(iy)` for every row, spread over `threads` workers.
template <typename RowFn>
void for_each_row(int ny, int threads, RowFn row_fn) {
  threads = std::clamp(threads, 1, ny);
  if (threads == 1) {
    for (int iy = 0; iy < ny; ++iy) row_fn(iy);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([=] {
      for (int iy = t; iy < ny; iy += threads) row_fn(iy);
    });
  }
  for (auto& th : pool) th.join();
}

MapResult scalar_map(MapKind kind, const Scenario& base, const GridSpec& grid, const OptOptions& opts,
                     const SweepOptions& sweep) {
  validate(grid);
  validate(opts);
  MapResult map;
  map.kind = kind;
  map.grid = grid;
  map.kkt_threshold = std::max(opts.grad_tol, opts.stall_tol);
  map.cells.resize(static_cast<std::size_t>(grid.nx) * grid.ny);

  for_each_row(grid.ny, sweep.threads, [&](int iy) {
    std::optional<BeamCovariance> warm;
    for (int ix = 0; ix < grid.nx; ++ix) {
      CellOutcome o = solve_cell(base, grid, opts, grid.x_at(ix), grid.y_at(iy), sweep.warm_start ? warm : std::nullopt);
      if (o.B) warm = std::move(o.B);
      map.cells[static_cast<std::size_t>(iy) * grid.nx + ix] = std::move(o.cell);
    }
  });
  return map;
}

}  // namespace

double GridSpec::x_at(int ix) const { return nx == 1 ? x_min : x_min + (x_max - x_min) * ix / (nx - 1); }
double GridSpec::y_at(int iy) const { return ny == 1 ? y_min : y_min + (y_max - y_min) * iy / (ny - 1); }

void validate(const GridSpec& g) {
  if (g.nx < 2 || g.ny < 2) throw InvalidArgument("grid needs at least 2 points per axis");
  if (!(g.x_min < g.x_max) || !(g.y_min < g.y_max)) throw InvalidArgument("grid bounds must be ordered");
  if (!(g.exclusion_radius >= 0.0) || !(g.baseline_band >= 0.0)) {
    throw InvalidArgument("exclusion distances must be non-negative");
  }
}

const char* to_string(CellStatus s) {
  switch (s) {
    case CellStatus::Ok: return "ok";
    case CellStatus::ExcludedGeometry: return "excluded-geometry";
    case CellStatus::SingularEfim: return "singular-efim";
    case CellStatus::NonConvergence: return "non-convergence";
  }
  return "unknown";
}

const char* to_string(RoleFlag r) {
  switch (r) {
    case RoleFlag::None: return "na";
    case RoleFlag::Forward: return "forward";
    case RoleFlag::Reverse: return "reverse";
    case RoleFlag::Tie: return "tie";
  }
  return "unknown";
}

const char* to_string(MapKind k) {
  switch (k) {
    case MapKind::Peb: return "peb";
    case MapKind::PowerShare: return "power";
    case MapKind::Role: return "role";
  }
  return "unknown";
}

int MapResult::finite_count() const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return std::isfinite(c.peb); }));
}

int MapResult::count(CellStatus s) const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(), [s](const CellResult& c) { return c.status == s; }));
}

int MapResult::count(RoleFlag r) const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(), [r](const CellResult& c) { return c.role == r; }));
}

bool excluded(const Scenario& s, const GridSpec& g, const Position2D& p) {
  const Eigen::Vector2d v = p.vec();
  if ((v - s.tx_position.vec()).norm() < g.exclusion_radius) return true;
  if ((v - s.rx_position.vec()).norm() < g.exclusion_radius) return true;
  return distance_to_segment(v, s.tx_position.vec(), s.rx_position.vec()) < g.baseline_band;
}

MapResult peb_map(const Scenario& base, const GridSpec& grid, const OptOptions& opts, const SweepOptions& sweep) {
  return scalar_map(MapKind::Peb, base, grid, opts, sweep);
}

MapResult power_share_map(const Scenario& base, const GridSpec& grid, const OptOptions& opts,
                          const SweepOptions& sweep) {
  return scalar_map(MapKind::PowerShare, base, grid, opts, sweep);
}

MapResult role_map(const Scenario& forward, const Scenario& reverse, const GridSpec& grid, const OptOptions& opts,
                   SweepOptions sweep) {
  validate(grid);
  validate(opts);
  MapResult map;
  map.kind = MapKind::Role;
  map.grid = grid;
  map.kkt_threshold = std::max(opts.grad_tol, opts.stall_tol);
  map.cells.resize(static_cast<std::size_t>(grid.nx) * grid.ny);

  for_each_row(grid.ny, sweep.threads, [&](int iy) {
    std::optional<BeamCovariance> warm_f;
    std::optional<BeamCovariance> warm_r;
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.x_at(ix);
      const double y = grid.y_at(iy);
      CellOutcome f = solve_cell(forward, grid, opts, x, y, sweep.warm_start ? warm_f : std::nullopt);
      CellOutcome r = solve_cell(reverse, grid, opts, x, y, sweep.warm_start ? warm_r : std::nullopt);
      if (f.B) warm_f = f.B;
      if (r.B) warm_r = r.B;

      CellResult cell;
      const bool f_ok = f.cell.status == CellStatus::Ok;
      const bool r_ok = r.cell.status == CellStatus::Ok;
      if (!f_ok && !r_ok) {
        cell = f.cell;
      } else if (f_ok && r_ok) {
        const double rel = std::abs(f.speb - r.speb) / std::max(f.speb, r.speb);
        if (rel < sweep.tie_tolerance) {
          cell = f.cell;
          cell.role = RoleFlag::Tie;
        } else if (f.speb < r.speb) {
          cell = f.cell;
          cell.role = RoleFlag::Forward;
        } else {
          cell = r.cell;
          cell.role = RoleFlag::Reverse;
        }
      } else if (f_ok) {
        cell = f.cell;
        cell.role = RoleFlag::Forward;
      } else {
        cell = r.cell;
        cell.role = RoleFlag::Reverse;
      }
      map.cells[static_cast<std::size_t>(iy) * grid.nx + ix] = std::move(cell);
    }
  });
  return map;
}

}  // namespace bistatic
