#pragma once

#include <Eigen/Core>

namespace bistatic {

struct Position2D {
  double x = 0.0;
  double y = 0.0;

  Eigen::Vector2d vec() const { return {x, y}; }
  friend bool operator==(const Position2D&, const Position2D&) = default;
};

using PositionJacobian = Eigen::Matrix<double, 2, 3>;

/// Bistatic geometry of a transmitter, a receiver and a point scatterer.
///
/// Angles are global azimuths, counter-clockwise from +x, in (-pi, pi].
/// Columns of `K` are the gradients w.r.t. the scatterer position of the
/// delay, the departure angle and the arrival angle, in that order.
struct GeometryState {
  double d_ts = 0.0;       // m
  double d_sr = 0.0;       // m
  double theta_t = 0.0;    // rad, transmitter -> scatterer
  double theta_r = 0.0;    // rad, receiver -> scatterer
  double tau = 0.0;        // s
  PositionJacobian K = PositionJacobian::Zero();
};

struct PolarUnits {
  Eigen::Vector2d e_r;
  Eigen::Vector2d e_phi;
};

PolarUnits polar_units(double phi);

/// Throws DegenerateGeometry if the scatterer sits on either node.
GeometryState derive_geometry(const Position2D& tx, const Position2D& rx, const Position2D& scatterer);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double phi);

}  // namespace bistatic
