#include "bistatic/geometry.hpp"

#include <cmath>
#include <sstream>

#include "bistatic/constants.hpp"
#include "bistatic/errors.hpp"

namespace bistatic {

PolarUnits polar_units(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return {Eigen::Vector2d(c, s), Eigen::Vector2d(-s, c)};
}

double wrap_angle(double phi) {
  double w = std::remainder(phi, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

namespace {

double azimuth(const Eigen::Vector2d& v) {
  double a = std::atan2(v.y(), v.x());
  // atan2(-0.0, x<0) yields -pi
  if (a <= -kPi) a = kPi;
  return a;
}

}  // namespace

GeometryState derive_geometry(const Position2D& tx, const Position2D& rx, const Position2D& scatterer) {
  const Eigen::Vector2d ts = scatterer.vec() - tx.vec();
  const Eigen::Vector2d rs = scatterer.vec() - rx.vec();

  GeometryState g;
  g.d_ts = ts.norm();
  g.d_sr = rs.norm();
  if (!(g.d_ts >= kDegenerateDistance) || !(g.d_sr >= kDegenerateDistance)) {
    std::ostringstream msg;
    msg << "scatterer at (" << scatterer.x << ", " << scatterer.y << ") coincides with a node";
    throw DegenerateGeometry(msg.str());
  }
  g.theta_t = azimuth(ts);
  g.theta_r = azimuth(rs);
  g.tau = (g.d_ts + g.d_sr) / kSpeedOfLight;

  const PolarUnits ut = polar_units(g.theta_t);
  const PolarUnits ur = polar_units(g.theta_r);
  g.K.col(0) = (ut.e_r + ur.e_r) / kSpeedOfLight;
  g.K.col(1) = ut.e_phi / g.d_ts;
  g.K.col(2) = ur.e_phi / g.d_sr;
  return g;
}

}  // namespace bistatic
