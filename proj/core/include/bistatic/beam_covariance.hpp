#pragma once

#include <Eigen/Core>
#include <vector>

namespace bistatic {

using Block = Eigen::Matrix2cd;

/// Block-diagonal transmit covariance: one 2x2 Hermitian PSD block per
/// subcarrier, expressed in the basis {a_T*/|a_T|, a_dot_T*/|a_dot_T|}.
/// Entry (0,0) is the power towards the scatterer, (1,1) the power into the
/// derivative direction, (1,0) their correlation.
struct BeamCovariance {
  std::vector<Block> blocks;

  BeamCovariance() = default;
  explicit BeamCovariance(std::size_t n) : blocks(n, Block::Zero()) {}

  std::size_t size() const { return blocks.size(); }
  Block& operator[](std::size_t p) { return blocks[p]; }
  const Block& operator[](std::size_t p) const { return blocks[p]; }

  double total_power() const;
  /// Sum over subcarriers of the (0,0) entries.
  double power_toward_target() const;

  BeamCovariance& operator+=(const BeamCovariance& o);
  BeamCovariance& operator-=(const BeamCovariance& o);
  BeamCovariance& operator*=(double t);
};

BeamCovariance operator+(BeamCovariance a, const BeamCovariance& b);
BeamCovariance operator-(BeamCovariance a, const BeamCovariance& b);
BeamCovariance operator*(double t, BeamCovariance a);

/// Real Frobenius inner product sum_p Re tr(A_p^H B_p).
double inner(const BeamCovariance& a, const BeamCovariance& b);
double frobenius_norm(const BeamCovariance& a);

struct FeasibilityReport {
  double hermitian_error = 0.0;   // max_p |B_p - B_p^H|
  double min_eigenvalue = 0.0;    // min over blocks
  double total_power = 0.0;
};

FeasibilityReport check_feasibility(const BeamCovariance& b);

/// Hermitian within 1e-12, PSD within psd_tol * trace, and within budget.
bool is_feasible(const BeamCovariance& b, double power_budget, double psd_tol = 1e-10);

}  // namespace bistatic
