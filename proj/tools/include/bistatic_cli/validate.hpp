#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bistatic/beamform.hpp"
#include "bistatic/scenario.hpp"
#include "bistatic/sweep.hpp"

namespace bistatic::cli {

struct CheckResult {
  std::string name;
  bool passed = true;
  bool skipped = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  int failures() const;
};

/// Runs the embedded invariant suite against a scenario at a fixed set of
/// scatterer positions. Deterministic for a given seed.
ValidationReport run_validation(const Scenario& base, const GridSpec& grid, const OptOptions& opts,
                                unsigned seed = 20240611u);

void print_scoreboard(const ValidationReport& r, std::ostream& out);

}  // namespace bistatic::cli
