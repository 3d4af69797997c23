#pragma once

#include <optional>
#include <vector>

#include "bistatic/beam_covariance.hpp"
#include "bistatic/scenario.hpp"

namespace bistatic {

struct OptOptions {
  int max_iters = 5000;
  /// Initial step; 0 selects power_budget / |G0|.
  double step_init = 0.0;
  double armijo_shrink = 0.5;
  double armijo_sufficient_decrease = 1e-4;
  /// Stop once |B - P(B - t G)| / power_budget < grad_tol with t = power_budget / |G|.
  double grad_tol = 1e-7;
  /// Accepted residual when the line search runs into the objective's rounding floor.
  double stall_tol = 1e-6;
  double psd_tol = 1e-10;
  double rank_tol = 1e-4;
};

void validate(const OptOptions& opts);

struct OptResult {
  BeamCovariance B_opt;
  double speb = 0.0;
  std::vector<double> speb_trace;  // objective after each accepted step, starting with B_init
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;       // relative projected-gradient norm at B_opt
  bool stalled = false;            // line search found no decrease before grad_tol was met
  std::vector<int> rank_profile;
  double power_share_toward_target = 0.0;
};

/// dSPEB/dB_p* for every block: d/dt SPEB(B + t D)|_0 = sum_p Re tr(G_p^H D_p)
/// for Hermitian D. Throws SingularEFIM where SPEB is undefined.
BeamCovariance speb_gradient(const SensingModel& m, const BeamCovariance& B);

/// Frobenius projection onto {B_p >= 0, sum_p tr B_p <= power_budget}.
/// With `scalar_beams` only the (0,0) entries survive.
BeamCovariance project_feasible(const BeamCovariance& raw, double power_budget, bool scalar_beams = false);

/// Relative projected-gradient norm used as the stationarity measure.
double kkt_residual(const BeamCovariance& B, const BeamCovariance& G, double power_budget, bool scalar_beams);

/// Equal split over the (0,0) and (1,1) entries of the two outermost
/// subcarriers (a single block when there is only one subcarrier).
BeamCovariance default_initial(const SensingModel& m);

/// Equal split over every diagonal entry of every block.
BeamCovariance uniform_initial(const SensingModel& m);

/// Minimizes SPEB by projected gradient descent with Armijo backtracking.
/// Throws InfeasibleScenario when no feasible covariance identifies the position.
OptResult optimize(const SensingModel& m, const OptOptions& opts = {},
                   const std::optional<BeamCovariance>& init = std::nullopt);

/// Rank-1 tilted-beam covariance on the two outermost subcarriers:
///   B_{+-} = [alpha, +-j t sqrt(alpha(1-alpha)); -+j t sqrt(alpha(1-alpha)), 1-alpha] P_T/2
/// with tilt t = +1 or -1, all other blocks zero.
BeamCovariance monopulse_candidate(const SensingModel& m, double alpha, int tilt = +1);

/// Rank of each block: eigenvalues above rank_tol times the largest
/// eigenvalue over all blocks.
std::vector<int> rank_profile(const BeamCovariance& B, double rank_tol = 1e-4);

}  // namespace bistatic
