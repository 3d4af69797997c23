#include "bistatic/beam_covariance.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace bistatic {

double BeamCovariance::total_power() const {
  double t = 0.0;
  for (const auto& b : blocks) t += b.trace().real();
  return t;
}

double BeamCovariance::power_toward_target() const {
  double t = 0.0;
  for (const auto& b : blocks) t += b(0, 0).real();
  return t;
}

BeamCovariance& BeamCovariance::operator+=(const BeamCovariance& o) {
  assert(o.size() == size());
  for (std::size_t p = 0; p < size(); ++p) blocks[p] += o.blocks[p];
  return *this;
}

BeamCovariance& BeamCovariance::operator-=(const BeamCovariance& o) {
  assert(o.size() == size());
  for (std::size_t p = 0; p < size(); ++p) blocks[p] -= o.blocks[p];
  return *this;
}

BeamCovariance& BeamCovariance::operator*=(double t) {
  for (auto& b : blocks) b *= t;
  return *this;
}

BeamCovariance operator+(BeamCovariance a, const BeamCovariance& b) { return a += b; }
BeamCovariance operator-(BeamCovariance a, const BeamCovariance& b) { return a -= b; }
BeamCovariance operator*(double t, BeamCovariance a) { return a *= t; }

double inner(const BeamCovariance& a, const BeamCovariance& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) s += (a[p].adjoint() * b[p]).trace().real();
  return s;
}

double frobenius_norm(const BeamCovariance& a) { return std::sqrt(inner(a, a)); }

FeasibilityReport check_feasibility(const BeamCovariance& b) {
  FeasibilityReport r;
  r.min_eigenvalue = b.size() ? std::numeric_limits<double>::infinity() : 0.0;
  for (const auto& blk : b.blocks) {
    r.hermitian_error = std::max(r.hermitian_error, (blk - blk.adjoint()).norm());
    Eigen::SelfAdjointEigenSolver<Block> es(blk, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = std::min(r.min_eigenvalue, es.eigenvalues().minCoeff());
  }
  r.total_power = b.total_power();
  return r;
}

bool is_feasible(const BeamCovariance& b, double power_budget, double psd_tol) {
  const FeasibilityReport r = check_feasibility(b);
  return r.hermitian_error < 1e-12 * std::max(1.0, power_budget) &&
         r.min_eigenvalue >= -psd_tol * std::max(r.total_power, power_budget) &&
         r.total_power <= power_budget * (1.0 + 1e-10);
}

}  // namespace bistatic
