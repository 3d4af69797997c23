#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "bistatic/bistatic.hpp"

namespace bistatic::test_support {

using cd = std::complex<double>;

inline std::mt19937_64 make_rng(unsigned long long seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

/// Scatterer position at least `min_offset` m off the baseline and away from both nodes.
inline Position2D random_target(std::mt19937_64& rng, double extent = 40.0, double min_offset = 1.0) {
  for (;;) {
    Position2D p{uniform(rng, -extent, extent), uniform(rng, -extent, extent)};
    if (std::abs(p.y) < min_offset) continue;
    if (std::hypot(p.x + 10.0, p.y) < 1.0 || std::hypot(p.x - 10.0, p.y) < 1.0) continue;
    return p;
  }
}

inline Scenario scenario_with(int subcarriers, int n_tx, int n_rx, const Position2D& target, bool narrowband = true) {
  Scenario s = default_scenario();
  const double lambda = s.wavelength();
  s.tx_array = build_uca(n_tx, lambda / 2.0);
  s.rx_array = build_uca(n_rx, lambda / 2.0);
  s.subcarrier_offsets = subcarrier_grid(subcarriers, 2.4e6);
  s.narrowband = narrowband;
  s.target = target;
  return s;
}

/// Random array sizes, orientations, subcarrier count, phase and target.
inline Scenario random_scenario(std::mt19937_64& rng, const std::vector<int>& subcarriers = {1, 2, 4, 5},
                                const std::vector<int>& n_tx = {1, 2, 8, 15}, const std::vector<int>& n_rx = {1, 3, 15}) {
  Scenario s = scenario_with(pick(rng, subcarriers), pick(rng, n_tx), pick(rng, n_rx), random_target(rng),
                             std::bernoulli_distribution(0.5)(rng));
  const double lambda = s.wavelength();
  s.tx_array = build_uca(s.tx_array.size(), lambda / 2.0, uniform(rng, -kPi, kPi));
  s.rx_array = build_uca(s.rx_array.size(), lambda / 2.0, uniform(rng, -kPi, kPi));
  s.gain.phase = uniform(rng, -kPi, kPi);
  return s;
}

/// Whether some feasible covariance identifies the position.
inline bool identifiable(const Scenario& s) {
  try {
    const SensingModel m = build_sensing_model(s);
    return std::isfinite(speb(m, uniform_initial(m)));
  } catch (const std::exception&) {
    return false;
  }
}

inline Scenario random_identifiable_scenario(std::mt19937_64& rng, const std::vector<int>& subcarriers = {1, 2, 4, 5},
                                             const std::vector<int>& n_tx = {1, 2, 8, 15},
                                             const std::vector<int>& n_rx = {1, 3, 15}) {
  for (;;) {
    Scenario s = random_scenario(rng, subcarriers, n_tx, n_rx);
    if (identifiable(s)) return s;
  }
}

/// Random Hermitian PSD blocks with total power in [0.5, 1] * budget.
inline BeamCovariance random_feasible(const SensingModel& m, std::mt19937_64& rng, bool full_rank = true) {
  std::normal_distribution<double> n01;
  BeamCovariance B(m.subcarrier_count());
  for (auto& b : B.blocks) {
    if (m.scalar_beams()) {
      b(0, 0) = std::pow(n01(rng), 2) + 0.1;
      continue;
    }
    Eigen::Matrix2cd A;
    for (int i = 0; i < 4; ++i) A(i / 2, i % 2) = cd(n01(rng), n01(rng));
    b = A * A.adjoint();
    if (full_rank) b += 0.05 * Block::Identity();
  }
  B *= m.power_budget * uniform(rng, 0.5, 1.0) / B.total_power();
  return B;
}

/// Rank-1 blocks v v^H with a random complex v, scaled to the full budget.
inline BeamCovariance random_rank_one(const SensingModel& m, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  BeamCovariance B(m.subcarrier_count());
  for (auto& b : B.blocks) {
    const Eigen::Vector2cd v(cd(n01(rng), n01(rng)), m.scalar_beams() ? cd(0.0) : cd(n01(rng), n01(rng)));
    b = v * v.adjoint();
  }
  B *= m.power_budget / B.total_power();
  return B;
}

/// Unit-norm Hermitian direction (restricted to (0,0) entries for scalar beams).
inline BeamCovariance random_direction(const SensingModel& m, std::mt19937_64& rng) {
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

/// Arbitrary Hermitian blocks, not necessarily PSD.
inline BeamCovariance random_hermitian(std::size_t n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n01;
  BeamCovariance H(n);
  for (auto& h : H.blocks) {
    h(0, 0) = scale * n01(rng);
    h(1, 1) = scale * n01(rng);
    h(1, 0) = scale * cd(n01(rng), n01(rng));
    h(0, 1) = std::conj(h(1, 0));
  }
  return H;
}

inline double rel_err(double a, double ref) { return std::abs(a - ref) / std::abs(ref); }

template <typename M>
double rel_frobenius(const M& a, const M& ref) {
  return (a - ref).norm() / ref.norm();
}

}  // namespace bistatic::test_support
