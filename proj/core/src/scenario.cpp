#include "bistatic/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "bistatic/constants.hpp"
#include "bistatic/errors.hpp"

namespace bistatic {

double channel_gain(double d_ts, double d_sr, double wavelength, double rcs_coefficient) {
  if (!(d_ts >= kDegenerateDistance) || !(d_sr >= kDegenerateDistance)) {
    throw DegenerateGeometry("channel gain needs strictly positive path lengths");
  }
  return rcs_coefficient * wavelength / (4.0 * kPi * d_ts * d_sr);
}

double Scenario::wavelength() const { return kTwoPi * kSpeedOfLight / omega_carrier; }

std::vector<double> subcarrier_grid(int count, double spacing_hz) {
  if (count < 1) throw InvalidArgument("need at least one subcarrier");
  std::vector<double> out;
  out.reserve(count);
  const int half = count / 2;
  for (int p = -half; p <= half; ++p) {
    if (p == 0 && count % 2 == 0) continue;
    out.push_back(kTwoPi * spacing_hz * p);
  }
  return out;
}

bool offsets_symmetric(const std::vector<double>& offsets, double rel_tol) {
  double scale = 0.0;
  for (double w : offsets) scale = std::max(scale, std::abs(w));
  const double tol = rel_tol * std::max(scale, 1.0);
  for (double w : offsets) {
    const bool found = std::any_of(offsets.begin(), offsets.end(),
                                   [&](double v) { return std::abs(v + w) <= tol; });
    if (!found) return false;
  }
  return true;
}

Scenario default_scenario() {
  Scenario s;
  const double carrier_hz = 3.8e9;
  s.omega_carrier = kTwoPi * carrier_hz;
  const double lambda = kSpeedOfLight / carrier_hz;
  s.tx_array = build_uca(15, lambda / 2.0);
  s.rx_array = build_uca(3, lambda / 2.0);
  s.subcarrier_offsets = subcarrier_grid(2, 2.4e6);
  s.noise_variance = 2.4e-14;
  s.power_budget = 10e-3;
  return s;
}

Scenario with_target(Scenario s, const Position2D& target) {
  s.target = target;
  return s;
}

Scenario reversed(const Scenario& s) {
  Scenario r = s;
  std::swap(r.tx_position, r.rx_position);
  std::swap(r.tx_array, r.rx_array);
  return r;
}

std::complex<double> channel_coefficient(const Scenario& s, const GeometryState& g) {
  const double mag = s.gain.fixed_magnitude ? *s.gain.fixed_magnitude
                                            : channel_gain(g.d_ts, g.d_sr, s.wavelength(), s.gain.rcs_coefficient);
  return std::polar(mag, s.gain.phase);
}

bool SensingModel::scalar_beams() const {
  return std::all_of(subcarriers.begin(), subcarriers.end(),
                     [](const SubcarrierTerms& t) { return t.tx_deriv_norm == 0.0; });
}

int SensingModel::lowest_subcarrier() const {
  auto it = std::min_element(subcarriers.begin(), subcarriers.end(),
                             [](const auto& a, const auto& b) { return a.omega < b.omega; });
  return static_cast<int>(it - subcarriers.begin());
}

int SensingModel::highest_subcarrier() const {
  auto it = std::max_element(subcarriers.begin(), subcarriers.end(),
                             [](const auto& a, const auto& b) { return a.omega < b.omega; });
  return static_cast<int>(it - subcarriers.begin());
}

SensingModel build_sensing_model(const Scenario& s) {
  if (s.tx_array.size() < 1 || s.rx_array.size() < 1) throw InvalidArray("empty antenna array");
  if (s.subcarrier_offsets.empty()) throw InvalidArgument("scenario has no subcarriers");
  if (!(s.noise_variance > 0.0)) throw InvalidArgument("noise variance must be positive");
  if (!(s.power_budget > 0.0)) throw InvalidArgument("power budget must be positive");
  if (!(s.omega_carrier > 0.0)) throw InvalidArgument("carrier frequency must be positive");

  SensingModel m;
  m.n_tx = s.tx_array.size();
  m.n_rx = s.rx_array.size();
  m.noise_variance = s.noise_variance;
  m.power_budget = s.power_budget;
  m.narrowband = s.narrowband;
  m.geometry = derive_geometry(s.tx_position, s.rx_position, s.target);
  m.h1 = channel_coefficient(s, m.geometry);

  // Relative threshold below which a derivative norm is an endfire null.
  constexpr double kNullDerivative = 1e-12;
  m.subcarriers.reserve(s.subcarrier_offsets.size());
  for (double w : s.subcarrier_offsets) {
    const double omega = s.narrowband ? s.omega_carrier : s.omega_carrier + w;
    const SteeringPair tx = steering(s.tx_array, m.geometry.theta_t, omega);
    const SteeringPair rx = steering(s.rx_array, m.geometry.theta_r, omega);
    SubcarrierTerms t;
    t.omega = w;
    t.tx_deriv_norm = tx.norm_a_dot > kNullDerivative * std::sqrt(m.n_tx) ? tx.norm_a_dot : 0.0;
    t.rx_deriv_norm = rx.norm_a_dot;
    m.subcarriers.push_back(t);
  }
  return m;
}

}  // namespace bistatic
