#include "bistatic/array_manifold.hpp"

#include <cmath>
#include <complex>

#include "bistatic/constants.hpp"
#include "bistatic/errors.hpp"
#include "bistatic/geometry.hpp"

namespace bistatic {

double uca_radius(int n, double spacing) {
  if (n < 2) return 0.0;
  return spacing / (2.0 * std::sin(kPi / n));
}

ArrayModel build_uca(int n, double spacing, double orientation) {
  if (n < 1) throw InvalidArray("array needs at least one element");
  if (!(spacing > 0.0)) throw InvalidArray("element spacing must be positive");

  ArrayModel array;
  array.orientation = orientation;
  array.element_positions.reserve(n);
  if (n == 1) {
    array.element_positions.emplace_back(0.0, 0.0);
    return array;
  }
  const double r = uca_radius(n, spacing);
  for (int k = 0; k < n; ++k) {
    const double psi = kTwoPi * k / n;
    array.element_positions.emplace_back(r * std::cos(psi), r * std::sin(psi));
  }
  // Remove the residual rounding offset of the centroid.
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : array.element_positions) centroid += p;
  centroid /= n;
  for (auto& p : array.element_positions) p -= centroid;
  return array;
}

SteeringPair steering(const ArrayModel& array, double global_angle, double omega_total) {
  const int n = array.size();
  const double k = omega_total / kSpeedOfLight;
  const PolarUnits u = polar_units(global_angle - array.orientation);

  SteeringPair out;
  out.a.resize(n);
  out.a_dot.resize(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d& pos = array.element_positions[i];
    const std::complex<double> ai = std::polar(1.0, k * u.e_r.dot(pos));
    out.a[i] = ai;
    out.a_dot[i] = std::complex<double>(0.0, k * u.e_phi.dot(pos)) * ai;
  }
  out.norm_a = out.a.norm();
  out.norm_a_dot = out.a_dot.norm();
  return out;
}

}  // namespace bistatic
