#pragma once

#include <Eigen/Core>
#include <vector>

namespace bistatic {

/// Planar antenna array. Element positions are in the array's local frame
/// and centred on their centroid, which makes every steering vector
/// orthogonal to its angle derivative.
struct ArrayModel {
  std::vector<Eigen::Vector2d> element_positions;  // m
  double orientation = 0.0;                        // rad, local x-axis w.r.t. global x-axis

  int size() const { return static_cast<int>(element_positions.size()); }
};

/// Uniform circular array with adjacent-element (chord) spacing `spacing`.
/// A single element sits at the origin.
ArrayModel build_uca(int n, double spacing, double orientation = 0.0);

/// Radius of a UCA with `n` elements and chord spacing `spacing`.
double uca_radius(int n, double spacing);

struct SteeringPair {
  Eigen::VectorXcd a;
  Eigen::VectorXcd a_dot;  // d a / d(local angle)
  double norm_a = 0.0;
  double norm_a_dot = 0.0;
};

/// Array response at `global_angle` for angular frequency `omega_total`
/// (carrier plus subcarrier offset). Element k is exp(j (w/c) e_r . pos_k).
SteeringPair steering(const ArrayModel& array, double global_angle, double omega_total);

/// Narrowband variant: the manifold is evaluated at the carrier only.
inline SteeringPair narrowband_steering(const ArrayModel& array, double global_angle, double omega_carrier) {
  return steering(array, global_angle, omega_carrier);
}

}  // namespace bistatic
