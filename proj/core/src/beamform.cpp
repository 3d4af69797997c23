#include "bistatic/beamform.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "bistatic/errors.hpp"
#include "bistatic/fisher.hpp"

namespace bistatic {

namespace {

using cd = std::complex<double>;

// Shift theta such that sum max(v - theta, 0) == budget (v sorted descending).
double simplex_shift(std::vector<double> v, double budget) {
  std::sort(v.begin(), v.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    cumulative += v[i];
    const double candidate = (cumulative - budget) / static_cast<double>(i + 1);
    if (v[i] - candidate > 0.0) theta = candidate;
  }
  return theta;
}

void zero_derivative_direction(BeamCovariance& B) {
  for (auto& b : B.blocks) {
    const double b11 = b(0, 0).real();
    b.setZero();
    b(0, 0) = b11;
  }
}

}  // namespace

void validate(const OptOptions& o) {
  if (o.max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if (o.step_init < 0.0) throw InvalidArgument("step_init must be non-negative");
  if (!(o.armijo_shrink > 0.0 && o.armijo_shrink < 1.0)) throw InvalidArgument("armijo_shrink must lie in (0, 1)");
  if (!(o.armijo_sufficient_decrease > 0.0 && o.armijo_sufficient_decrease < 1.0)) {
    throw InvalidArgument("armijo_sufficient_decrease must lie in (0, 1)");
  }
  if (!(o.grad_tol > 0.0) || !(o.stall_tol > 0.0) || !(o.psd_tol > 0.0) || !(o.rank_tol > 0.0)) {
    throw InvalidArgument("tolerances must be positive");
  }
}

BeamCovariance speb_gradient(const SensingModel& m, const BeamCovariance& B) {
  const Matrix5d J = fim_entrywise(m, B);
  const double j11 = J(0, 0);
  if (!(j11 > 0.0)) throw SingularEFIM("no power directed towards the scatterer");
  const Eigen::Matrix<double, 2, 3> J12 = J.topRightCorner<2, 3>();
  const Eigen::Matrix3d Je = J.bottomRightCorner<3, 3>() - J12.transpose() * J12 / j11;
  const PositionJacobian& K = m.geometry.K;
  const Eigen::Matrix2d M = K * Je * K.transpose();
  trace_inverse_2x2(M);  // singularity guard
  const Eigen::Matrix2d Minv = M.inverse();

  // SPEB = tr(M^-1), M = K Je K^T, Je = L J L^T with L = [-J12^T J11^-1, I]:
  // dSPEB = -tr(V dJ), V = L^T K^T M^-2 K L.
  Eigen::Matrix<double, 3, 5> L;
  L.leftCols<2>() = -J12.transpose() / j11;
  L.rightCols<3>().setIdentity();
  const Eigen::Matrix<double, 2, 5> KL = K * L;
  const Matrix5d V = KL.transpose() * (Minv * Minv) * KL;

  const double k = 2.0 / m.noise_variance;
  const double h2 = std::norm(m.h1);
  BeamCovariance G(B.size());
  for (int p = 0; p < m.subcarrier_count(); ++p) {
    const XformPair x = xform_matrices(m, p);
    Block g = -k * (h2 * x.rx.adjoint() * V * x.rx + x.tx.adjoint() * V * x.tx);
    G[p] = 0.5 * (g + g.adjoint());
  }
  if (m.scalar_beams()) zero_derivative_direction(G);
  return G;
}

BeamCovariance project_feasible(const BeamCovariance& raw, double power_budget, bool scalar_beams) {
  const std::size_t n = raw.size();
  BeamCovariance out(n);
  if (scalar_beams) {
    std::vector<double> v(n);
    double sum = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      v[p] = std::max(raw[p](0, 0).real(), 0.0);
      sum += v[p];
    }
    const double theta = sum > power_budget ? simplex_shift(v, power_budget) : 0.0;
    for (std::size_t p = 0; p < n; ++p) out[p](0, 0) = std::max(v[p] - theta, 0.0);
    return out;
  }

  std::vector<Eigen::SelfAdjointEigenSolver<Block>> eig(n);
  std::vector<double> values;
  values.reserve(2 * n);
  double sum = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const Block h = 0.5 * (raw[p] + raw[p].adjoint());
    eig[p].compute(h);
    for (int i = 0; i < 2; ++i) {
      const double lam = std::max(eig[p].eigenvalues()(i), 0.0);
      values.push_back(lam);
      sum += lam;
    }
  }
  const double theta = sum > power_budget ? simplex_shift(values, power_budget) : 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    Eigen::Vector2d mu;
    for (int i = 0; i < 2; ++i) mu(i) = std::max(values[2 * p + i] - theta, 0.0);
    const auto& Q = eig[p].eigenvectors();
    Block b = Q * mu.cast<cd>().asDiagonal() * Q.adjoint();
    out[p] = 0.5 * (b + b.adjoint());
  }
  return out;
}

double kkt_residual(const BeamCovariance& B, const BeamCovariance& G, double power_budget, bool scalar_beams) {
  const double gnorm = frobenius_norm(G);
  if (gnorm == 0.0) return 0.0;
  const double t = power_budget / gnorm;
  BeamCovariance trial = B;
  trial -= t * G;
  const BeamCovariance P = project_feasible(trial, power_budget, scalar_beams);
  return frobenius_norm(B - P) / power_budget;
}

BeamCovariance default_initial(const SensingModel& m) {
  BeamCovariance B(m.subcarrier_count());
  const int lo = m.lowest_subcarrier();
  const int hi = m.highest_subcarrier();
  const bool scalar = m.scalar_beams();
  std::vector<int> active{lo};
  if (hi != lo) active.push_back(hi);
  const double entries = static_cast<double>(active.size()) * (scalar ? 1.0 : 2.0);
  const double share = m.power_budget / entries;
  for (int p : active) {
    B[p](0, 0) = share;
    if (!scalar) B[p](1, 1) = share;
  }
  return B;
}

BeamCovariance uniform_initial(const SensingModel& m) {
  const bool scalar = m.scalar_beams();
  const double entries = m.subcarrier_count() * (scalar ? 1.0 : 2.0);
  const double share = m.power_budget / entries;
  BeamCovariance B(m.subcarrier_count());
  for (auto& b : B.blocks) {
    b(0, 0) = share;
    if (!scalar) b(1, 1) = share;
  }
  return B;
}

namespace {

constexpr double kRoundingFloor = 64.0 * std::numeric_limits<double>::epsilon();

// <G, B_next - B> accumulated in extended precision. When both iterates
// saturate the budget the step has zero trace, so the multiple of the
// identity carried by G is removed first; its product with the rounding
// error in tr(B_next - B) would otherwise swamp the decrease near the optimum.
double directional_change(const BeamCovariance& G, const BeamCovariance& B, const BeamCovariance& B_next,
                          double budget, bool scalar) {
  const int dims = scalar ? 1 : 2;
  const double saturation_tol = 1e-13 * budget;
  const bool saturated =
      std::abs(B.total_power() - budget) <= saturation_tol && std::abs(B_next.total_power() - budget) <= saturation_tol;
  long double shift = 0.0L;
  if (saturated) {
    for (const auto& g : G.blocks) {
      for (int i = 0; i < dims; ++i) shift += g(i, i).real();
    }
    shift /= static_cast<long double>(dims * G.size());
  }
  long double acc = 0.0L;
  for (std::size_t p = 0; p < G.size(); ++p) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const cd d = B_next[p](i, j) - B[p](i, j);
        long double g_re = G[p](i, j).real();
        if (i == j && i < dims) g_re -= shift;
        acc += g_re * d.real() + static_cast<long double>(G[p](i, j).imag()) * d.imag();
      }
    }
  }
  return static_cast<double>(acc);
}

bool objective_defined(const SensingModel& m, const BeamCovariance& B, double& value) {
  try {
    value = speb(m, B);
    return std::isfinite(value);
  } catch (const SingularEFIM&) {
    return false;
  }
}

// Narrowband: the derivative beam enters only through sum_p b22, so power
// parked on interior subcarriers with no share towards the scatterer can
// move to the outermost pair without changing SPEB. Returns the moved copy
// when the objective confirms it.
void consolidate_support(const SensingModel& m, BeamCovariance& B, double& f, double rank_tol) {
  const int lo = m.lowest_subcarrier();
  const int hi = m.highest_subcarrier();
  double peak = 0.0;
  for (const auto& b : B.blocks) peak = std::max(peak, b.trace().real());
  BeamCovariance C = B;
  double moved_aa = 0.0;
  double moved_dd = 0.0;
  bool any = false;
  for (int p = 0; p < m.subcarrier_count(); ++p) {
    if (p == lo || p == hi) continue;
    Block& b = C[p];
    if (b(0, 0).real() > rank_tol * peak) continue;
    moved_aa += b(0, 0).real();
    moved_dd += b(1, 1).real();
    b.setZero();
    any = true;
  }
  if (!any) return;
  for (int p : {lo, hi}) {
    C[p](0, 0) += 0.5 * moved_aa;
    C[p](1, 1) += 0.5 * moved_dd;
  }
  double f_c = 0.0;
  if (objective_defined(m, C, f_c) && f_c <= f * (1.0 + 1e-12)) {
    B = std::move(C);
    f = f_c;
  }
}

}  // namespace

OptResult optimize(const SensingModel& m, const OptOptions& opts, const std::optional<BeamCovariance>& init) {
  validate(opts);
  const double budget = m.power_budget;
  const bool scalar = m.scalar_beams();

  // Every feasible B is dominated by a multiple of the uniform covariance and
  // the EFIM is monotone, so a singular uniform start means no B works.
  double f = 0.0;
  const BeamCovariance uniform = uniform_initial(m);
  if (!objective_defined(m, uniform, f)) {
    throw InfeasibleScenario(
        "position is unidentifiable for every beam covariance (need two of: "
        "delay from >= 2 subcarriers, departure angle from N_T >= 2, arrival angle from N_R >= 2, "
        "and non-collinear geometry)");
  }

  BeamCovariance B;
  if (init && init->size() == static_cast<std::size_t>(m.subcarrier_count())) {
    B = project_feasible(*init, budget, scalar);
    if (!objective_defined(m, B, f)) B = default_initial(m);
  } else {
    B = default_initial(m);
  }
  if (!objective_defined(m, B, f)) {
    B = uniform;
    objective_defined(m, B, f);
  }

  OptResult res;
  res.speb_trace.push_back(f);
  BeamCovariance G = speb_gradient(m, B);
  const double s0 = opts.step_init > 0.0 ? opts.step_init : budget / std::max(frobenius_norm(G), 1e-300);
  const double s_min = s0 * 1e-14;
  const double s_max = s0 * 1e12;
  double step = s0;

  int it = 0;
  res.kkt_residual = kkt_residual(B, G, budget, scalar);
  for (; it < opts.max_iters; ++it) {
    if (res.kkt_residual < opts.grad_tol) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    BeamCovariance B_next;
    double f_next = 0.0;
    double s = std::clamp(step, s_min, s_max);
    for (int backtrack = 0; backtrack < 80; ++backtrack) {
      BeamCovariance trial = B;
      trial -= s * G;
      B_next = project_feasible(trial, budget, scalar);
      const double decrease = directional_change(G, B, B_next, budget, scalar);
      if (decrease >= 0.0) break;  // no descent left at this resolution
      if (objective_defined(m, B_next, f_next)) {
        const double required = opts.armijo_sufficient_decrease * decrease;
        // Below the objective's rounding resolution only non-increase is testable.
        const bool at_precision_floor = -required < kRoundingFloor * std::abs(f);
        if (f_next <= f + required || (at_precision_floor && f_next <= f)) {
          accepted = true;
          break;
        }
      }
      s *= opts.armijo_shrink;
    }
    if (!accepted) {
      res.stalled = true;
      break;
    }

    const BeamCovariance G_next = speb_gradient(m, B_next);
    // Barzilai-Borwein trial step for the next iteration.
    const BeamCovariance dB = B_next - B;
    const BeamCovariance dG = G_next - G;
    const double curvature = inner(dB, dG);
    step = curvature > 0.0 ? inner(dB, dB) / curvature : s_max;

    B = B_next;
    G = G_next;
    f = f_next;
    res.speb_trace.push_back(f);
    res.kkt_residual = kkt_residual(B, G, budget, scalar);
  }
  if (!res.converged && res.kkt_residual < opts.grad_tol) res.converged = true;
  if (!res.converged && res.stalled && res.kkt_residual < opts.stall_tol) res.converged = true;

  if (m.narrowband && !scalar && m.subcarrier_count() > 2) {
    consolidate_support(m, B, f, opts.rank_tol);
    res.speb_trace.back() = f;
    res.kkt_residual = kkt_residual(B, speb_gradient(m, B), budget, scalar);
  }

  res.iterations = it;
  res.B_opt = B;
  res.speb = f;
  res.rank_profile = rank_profile(B, opts.rank_tol);
  res.power_share_toward_target = std::clamp(B.power_toward_target() / budget, 0.0, 1.0);
  return res;
}

BeamCovariance monopulse_candidate(const SensingModel& m, double alpha, int tilt) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidAlpha("alpha must lie in [0, 1]");
  if (m.subcarrier_count() < 2) throw InvalidArgument("tilted-beam solution needs at least two subcarriers");
  if (tilt != 1 && tilt != -1) throw InvalidArgument("tilt must be +1 or -1");
  const int hi = m.highest_subcarrier();
  const int lo = m.lowest_subcarrier();
  const double half = 0.5 * m.power_budget;
  const double c = tilt * std::sqrt(alpha * (1.0 - alpha));

  BeamCovariance B(m.subcarrier_count());
  B[hi] << alpha, cd(0.0, c), cd(0.0, -c), 1.0 - alpha;
  B[lo] << alpha, cd(0.0, -c), cd(0.0, c), 1.0 - alpha;
  B[hi] *= half;
  B[lo] *= half;
  return B;
}

std::vector<int> rank_profile(const BeamCovariance& B, double rank_tol) {
  std::vector<Eigen::Vector2d> eigs;
  eigs.reserve(B.size());
  double largest = 0.0;
  for (const auto& b : B.blocks) {
    Eigen::SelfAdjointEigenSolver<Block> es(0.5 * (b + b.adjoint()), Eigen::EigenvaluesOnly);
    eigs.push_back(es.eigenvalues());
    largest = std::max(largest, es.eigenvalues().maxCoeff());
  }
  std::vector<int> ranks;
  ranks.reserve(B.size());
  for (const auto& e : eigs) {
    int r = 0;
    if (largest > 0.0) {
      for (int i = 0; i < 2; ++i) r += e(i) > rank_tol * largest ? 1 : 0;
    }
    ranks.push_back(r);
  }
  return ranks;
}

}  // namespace bistatic
