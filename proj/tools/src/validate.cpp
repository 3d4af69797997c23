#include "bistatic_cli/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "bistatic/errors.hpp"
#include "bistatic/fisher.hpp"

namespace bistatic::cli {

namespace {

using cd = std::complex<double>;

CheckResult named(const char* name) {
  CheckResult r;
  r.name = name;
  return r;
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

BeamCovariance random_feasible(const SensingModel& m, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(0.5, 1.0);
  BeamCovariance B(m.subcarrier_count());
  for (auto& b : B.blocks) {
    if (m.scalar_beams()) {
      b(0, 0) = std::pow(n01(rng), 2) + 0.1;
      continue;
    }
    Eigen::Matrix2cd A;
    for (int i = 0; i < 4; ++i) A(i / 2, i % 2) = cd(n01(rng), n01(rng));
    b = A * A.adjoint() + 0.05 * Block::Identity();
  }
  B *= m.power_budget * u(rng) / B.total_power();
  return B;
}

BeamCovariance random_direction(const SensingModel& m, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  BeamCovariance D(m.subcarrier_count());
  for (auto& d : D.blocks) {
    d(0, 0) = n01(rng);
    if (m.scalar_beams()) continue;
    d(1, 1) = n01(rng);
    d(1, 0) = cd(n01(rng), n01(rng));
    d(0, 1) = std::conj(d(1, 0));
  }
  D *= 1.0 / frobenius_norm(D);
  return D;
}

double rel_frobenius(const Matrix5d& a, const Matrix5d& ref) { return (a - ref).norm() / ref.norm(); }

struct Probe {
  Position2D target;
  Scenario scenario;
  SensingModel model;
};

std::vector<Probe> probes(const Scenario& base, const GridSpec& grid) {
  const Position2D candidates[] = {{0.0, 10.0}, {-6.0, 14.0}, {17.0, -9.0}, {4.0, 31.0}, {-27.0, -22.0}, {9.0, 3.0}};
  std::vector<Probe> out;
  for (const auto& t : candidates) {
    if (excluded(base, grid, t)) continue;
    Scenario s = with_target(base, t);
    try {
      out.push_back({t, s, build_sensing_model(s)});
    } catch (const Error&) {
    }
  }
  return out;
}

std::string where(const Position2D& p) {
  std::ostringstream os;
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

CheckResult check_dual_path(const std::vector<Probe>& ps, std::mt19937_64& rng) {
  CheckResult r = named("fim-dual-path");
  double worst = 0.0;
  for (const auto& p : ps) {
    for (int k = 0; k < 3; ++k) {
      const BeamCovariance B = random_feasible(p.model, rng);
      const Matrix5d ref = fim_entrywise(p.model, B);
      worst = std::max(worst, rel_frobenius(fim_xform(p.model, B), ref));
      worst = std::max(worst, rel_frobenius(fim_from_derivatives(p.scenario, realize_pilots(p.scenario, B)), ref));
    }
  }
  r.passed = worst < 1e-8;
  r.detail = fmt("max relative Frobenius error %.3e (limit 1e-8)", worst);
  return r;
}

CheckResult check_gradient(const std::vector<Probe>& ps, std::mt19937_64& rng) {
  CheckResult r = named("gradient");
  double worst = 0.0;
  for (const auto& p : ps) {
    for (int k = 0; k < 3; ++k) {
      const BeamCovariance B = random_feasible(p.model, rng);
      const BeamCovariance D = random_direction(p.model, rng);
      const double h = 1e-6 * p.model.power_budget;
      const double fd = (speb(p.model, B + h * D) - speb(p.model, B - h * D)) / (2.0 * h);
      const double an = inner(speb_gradient(p.model, B), D);
      worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(fd), 1e-300));
    }
  }
  r.passed = worst < 1e-5;
  r.detail = fmt("max relative directional-derivative error %.3e (limit 1e-5)", worst);
  return r;
}

CheckResult check_convexity(const std::vector<Probe>& ps, std::mt19937_64& rng) {
  CheckResult r = named("convexity");
  int violations = 0;
  int probes_run = 0;
  for (const auto& p : ps) {
    for (int k = 0; k < 5; ++k) {
      const BeamCovariance A = random_feasible(p.model, rng);
      const BeamCovariance B = random_feasible(p.model, rng);
      const double fa = speb(p.model, A);
      const double fb = speb(p.model, B);
      for (double lam : {0.25, 0.5, 0.75}) {
        const double mixed = speb(p.model, lam * A + (1.0 - lam) * B);
        const double chord = lam * fa + (1.0 - lam) * fb;
        if (mixed > chord + 1e-9 * chord) ++violations;
        ++probes_run;
      }
    }
  }
  r.passed = violations == 0;
  r.detail = std::to_string(violations) + " Jensen violations in " + std::to_string(probes_run) + " probes";
  return r;
}

CheckResult check_subcarrier_symmetry(const Scenario& s) {
  CheckResult r = named("subcarrier-symmetry");
  if (!s.symmetric_subcarriers) {
    r.skipped = true;
    r.detail = "offsets not declared symmetric";
    return r;
  }
  r.passed = offsets_symmetric(s.subcarrier_offsets);
  r.detail = r.passed ? "declared symmetric offsets are closed under negation"
                      : "SYMMETRY VIOLATED: offsets declared symmetric have no negated partner; "
                        "mirror-structure results do not apply";
  return r;
}

struct Optimized {
  const Probe* probe;
  OptResult res;
};

}  // namespace

bool ValidationReport::passed() const { return failures() == 0; }

int ValidationReport::failures() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
}

ValidationReport run_validation(const Scenario& base, const GridSpec& grid, const OptOptions& opts, unsigned seed) {
  ValidationReport rep;
  std::mt19937_64 rng(seed);

  rep.checks.push_back(check_subcarrier_symmetry(base));
  const bool symmetric = base.symmetric_subcarriers && offsets_symmetric(base.subcarrier_offsets);

  const std::vector<Probe> ps = probes(base, grid);
  if (ps.empty()) {
    rep.checks.push_back({"probe-points", false, false, "no usable scatterer positions"});
    return rep;
  }

  auto guarded = [&](const char* name, const std::function<CheckResult()>& f) {
    try {
      rep.checks.push_back(f());
    } catch (const std::exception& e) {
      rep.checks.push_back({name, false, false, std::string("threw: ") + e.what()});
    }
  };

  guarded("fim-dual-path", [&] { return check_dual_path(ps, rng); });
  guarded("gradient", [&] { return check_gradient(ps, rng); });
  guarded("convexity", [&] { return check_convexity(ps, rng); });

  std::vector<Optimized> opt;
  {
    CheckResult r = named("convergence");
    double worst = 0.0;
    for (const auto& p : ps) {
      try {
        opt.push_back({&p, optimize(p.model, opts)});
        worst = std::max(worst, opt.back().res.kkt_residual);
        if (!opt.back().res.converged) {
          r.passed = false;
          r.detail = "no convergence at " + where(p.target);
        }
      } catch (const std::exception& e) {
        r.passed = false;
        r.detail = "optimize threw at " + where(p.target) + ": " + e.what();
      }
    }
    if (r.passed) r.detail = fmt("%.0f points, max KKT residual %.3e", static_cast<double>(opt.size()), worst);
    rep.checks.push_back(r);
  }

  {
    CheckResult r = named("budget-saturation");
    double worst = 0.0;
    for (const auto& o : opt) {
      const double P = o.probe->model.power_budget;
      worst = std::max(worst, std::abs(o.res.B_opt.total_power() - P) / P);
    }
    r.passed = worst < 1e-8;
    r.detail = fmt("max |tr B - P_T| / P_T = %.3e (limit 1e-8)", worst);
    rep.checks.push_back(r);
  }

  const bool scalar = ps.front().model.scalar_beams();
  {
    CheckResult r = named("real-correlation-zero");
    if (!symmetric || scalar) {
      r.skipped = true;
      r.detail = scalar ? "no derivative beam" : "requires symmetric offsets";
    } else {
      double worst = 0.0;
      for (const auto& o : opt) {
        for (const auto& b : o.res.B_opt.blocks) {
          worst = std::max(worst, std::abs(b(1, 0).real()) / o.probe->model.power_budget);
        }
      }
      r.passed = worst < 1e-7;
      r.detail = fmt("max |Re b21| / P_T = %.3e (limit 1e-7)", worst);
    }
    rep.checks.push_back(r);
  }

  if (base.narrowband) {
    CheckResult r = named("outermost-support");
    if (!symmetric) {
      r.skipped = true;
      r.detail = "requires symmetric offsets";
    } else {
      double interior = 0.0;
      double mirror = 0.0;
      for (const auto& o : opt) {
        const SensingModel& m = o.probe->model;
        const int lo = m.lowest_subcarrier();
        const int hi = m.highest_subcarrier();
        for (int p = 0; p < m.subcarrier_count(); ++p) {
          if (p != lo && p != hi) interior = std::max(interior, o.res.B_opt[p].trace().real() / m.power_budget);
        }
        const Block& bl = o.res.B_opt[lo];
        const Block& bh = o.res.B_opt[hi];
        mirror = std::max(mirror, std::abs(bl(0, 0).real() - bh(0, 0).real()) / m.power_budget);
        mirror = std::max(mirror, std::abs(bl(1, 0).imag() + bh(1, 0).imag()) / m.power_budget);
      }
      r.passed = interior < 1e-6 && mirror < 1e-6;
      r.detail = fmt("interior power %.3e, mirror deviation %.3e (limit 1e-6 P_T)", interior, mirror);
    }
    rep.checks.push_back(r);
  } else {
    CheckResult r = named("higher-subcarrier-trend");
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& o : opt) {
      const SensingModel& m = o.probe->model;
      double weighted = 0.0;
      double plain = 0.0;
      for (int p = 0; p < m.subcarrier_count(); ++p) {
        const double w = std::abs(m.subcarriers[p].omega);
        weighted += w * o.res.B_opt[p].trace().real() / o.res.B_opt.total_power();
        plain += w / m.subcarrier_count();
      }
      worst = std::min(worst, (weighted - plain) / std::max(plain, 1e-300));
    }
    r.passed = worst >= -1e-9;
    r.detail = fmt("power-weighted |offset| exceeds the plain mean by at least %.3e (relative)", worst);
    rep.checks.push_back(r);
  }

  {
    CheckResult r = named("known-gain-identity");
    if (scalar) {
      r.skipped = true;
      r.detail = "no derivative beam";
    } else {
      double worst = 0.0;
      bool strict = true;
      for (const auto& o : opt) {
        const SensingModel& m = o.probe->model;
        const FisherBundle at = fisher_bundle(m, o.res.B_opt);
        worst = std::max(worst, std::abs(at.speb_known_gain - at.speb) / at.speb);

        BeamCovariance Bp = 0.9 * o.res.B_opt + 0.1 * uniform_initial(m);
        const int hi = m.highest_subcarrier();
        const double bound = std::sqrt(Bp[hi](0, 0).real() * Bp[hi](1, 1).real()) - std::abs(Bp[hi](1, 0));
        Bp[hi](1, 0) += 0.5 * bound;
        Bp[hi](0, 1) = std::conj(Bp[hi](1, 0));
        const FisherBundle off = fisher_bundle(m, Bp);
        if (!(off.speb_known_gain < off.speb)) strict = false;
      }
      r.passed = worst < 1e-10 && strict;
      r.detail = fmt("optimum relative gap %.3e (limit 1e-10); perturbed strict gain: ", worst) +
                 (strict ? "yes" : "NO");
    }
    rep.checks.push_back(r);
  }
  return rep;
}

void print_scoreboard(const ValidationReport& r, std::ostream& out) {
  for (const auto& c : r.checks) {
    const char* tag = c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL");
    out << "[" << tag << "] " << c.name << ": " << c.detail << "\n";
  }
  out << (r.passed() ? "all checks passed" : std::to_string(r.failures()) + " check(s) failed") << "\n";
}

}  // namespace bistatic::cli
