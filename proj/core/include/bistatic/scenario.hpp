#pragma once

#include <Eigen/Core>
#include <complex>
#include <optional>
#include <vector>

#include "bistatic/array_manifold.hpp"
#include "bistatic/geometry.hpp"

namespace bistatic {

/// Path-loss model for the scattered path:
/// |h1| = rcs_coefficient * lambda / (4 pi d_ts d_sr).
struct ChannelGainModel {
  double rcs_coefficient = 0.1;  // m
  double phase = 0.0;            // rad
  /// Overrides the path-loss model when set.
  std::optional<double> fixed_magnitude;
};

/// |h1| for the given path lengths. Throws DegenerateGeometry on a zero distance.
double channel_gain(double d_ts, double d_sr, double wavelength, double rcs_coefficient = 0.1);

/// Full physical setup of one bistatic link and its target.
struct Scenario {
  Position2D tx_position{-10.0, 0.0};
  Position2D rx_position{10.0, 0.0};
  Position2D target{0.0, 10.0};
  ArrayModel tx_array;
  ArrayModel rx_array;
  double omega_carrier = 0.0;                // rad/s
  std::vector<double> subcarrier_offsets;    // rad/s, ascending
  double noise_variance = 0.0;               // W per receive antenna
  double power_budget = 0.0;                 // W
  ChannelGainModel gain;
  bool narrowband = true;
  /// Declares that every offset w has a partner -w.
  bool symmetric_subcarriers = true;

  double wavelength() const;
  int subcarrier_count() const { return static_cast<int>(subcarrier_offsets.size()); }
};

/// Baseband offsets for `count` subcarriers spaced `spacing_hz` apart.
/// Even counts use indices +-1..+-count/2 (no DC), odd counts 0, +-1, ...
std::vector<double> subcarrier_grid(int count, double spacing_hz);

/// True when the offsets are closed under negation (relative tolerance).
bool offsets_symmetric(const std::vector<double>& offsets, double rel_tol = 1e-12);

/// Reference setup: 3.8 GHz, two subcarriers at +-2.4 MHz, 15-element
/// transmit and 3-element receive UCAs with half-wavelength spacing,
/// nodes at (-10, 0) and (10, 0) m, 2.4e-14 W noise, 10 mW budget.
Scenario default_scenario();

/// Same scenario with a different target position.
Scenario with_target(Scenario s, const Position2D& target);

/// Swaps which node transmits; node positions and their arrays stay put.
Scenario reversed(const Scenario& s);

std::complex<double> channel_coefficient(const Scenario& s, const GeometryState& g);

/// Per-subcarrier scalars that fully determine the Fisher information once
/// the precoder is aligned with the steering vector and its derivative.
struct SubcarrierTerms {
  double omega = 0.0;           // baseband offset, rad/s
  double tx_deriv_norm = 0.0;   // |a_dot_T[p]|
  double rx_deriv_norm = 0.0;   // |a_dot_R[p]|
};

struct SensingModel {
  int n_tx = 0;
  int n_rx = 0;
  double noise_variance = 0.0;
  double power_budget = 0.0;
  std::complex<double> h1;
  GeometryState geometry;
  std::vector<SubcarrierTerms> subcarriers;
  bool narrowband = true;

  int subcarrier_count() const { return static_cast<int>(subcarriers.size()); }
  /// No usable derivative direction at the transmitter (e.g. a single antenna):
  /// every beam covariance collapses to its (0, 0) entry.
  bool scalar_beams() const;
  /// Indices of the lowest and highest offsets.
  int lowest_subcarrier() const;
  int highest_subcarrier() const;
};

SensingModel build_sensing_model(const Scenario& s);

}  // namespace bistatic
