#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "bistatic/beam_covariance.hpp"
#include "bistatic/geometry.hpp"
#include "bistatic/scenario.hpp"

namespace bistatic {

/// Parameter order: Re h1, Im h1, delay, departure angle, arrival angle.
using Matrix5d = Eigen::Matrix<double, 5, 5>;
using Matrix5x2cd = Eigen::Matrix<std::complex<double>, 5, 2>;

/// Fisher information and everything derived from it for one beam covariance.
struct FisherBundle {
  Matrix5d J = Matrix5d::Zero();
  Eigen::Matrix2d J11 = Eigen::Matrix2d::Zero();
  Eigen::Matrix<double, 2, 3> J12 = Eigen::Matrix<double, 2, 3>::Zero();
  Eigen::Matrix3d J22 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d Je = Eigen::Matrix3d::Zero();   // unknown channel coefficient
  Eigen::Matrix3d Jeh = Eigen::Matrix3d::Zero();  // known channel gain |h1|
  PositionJacobian K = PositionJacobian::Zero();
  double speb = 0.0;             // m^2
  double speb_known_gain = 0.0;  // m^2
  /// Departure-angle entry of the known-gain subtrahend, j_eh / j11.
  double known_gain_aod_term = 0.0;

  double peb() const;
};

/// Transmit precoder for subcarrier p: [a_T*/|a_T|, a_dot_T*/|a_dot_T|].
/// A single column when the transmitter has no derivative direction.
Eigen::MatrixXcd precoder(const Scenario& s, int p);

/// J from the closed-form entries (delay/angle entries and the
/// channel-coefficient rows).
Matrix5d fim_entrywise(const SensingModel& m, const BeamCovariance& B);

/// J = 2/sigma^2 sum_p Re(|h1|^2 X_R B_p X_R^H + X_T B_p X_T^H).
Matrix5d fim_xform(const SensingModel& m, const BeamCovariance& B);

struct XformPair {
  Matrix5x2cd rx;
  Matrix5x2cd tx;
};
XformPair xform_matrices(const SensingModel& m, int p);

/// Deterministic transmit vectors per subcarrier; their outer-product sum is
/// the transmit covariance R_s[p].
struct PilotSet {
  std::vector<std::vector<Eigen::VectorXcd>> per_subcarrier;
};

/// Pilots s_i = sqrt(lambda_i) F_p v_i from the eigen-decomposition of B_p.
PilotSet realize_pilots(const Scenario& s, const BeamCovariance& B);

/// J straight from the derivatives of the noiseless received signal with
/// respect to the five parameters, summed over pilot vectors. Independent of
/// the precoder structure; used to cross-check the closed forms.
Matrix5d fim_from_derivatives(const Scenario& s, const PilotSet& pilots);

/// Partitions J, forms both equivalent FIMs and both SPEBs.
/// Throws SingularEFIM when the position-domain FIM cannot be inverted.
FisherBundle make_bundle(const Matrix5d& J, const PositionJacobian& K, std::complex<double> h1);

FisherBundle fisher_bundle(const SensingModel& m, const BeamCovariance& B);

/// tr((K Je K^T)^{-1}).
double speb_from_efim(const Eigen::Matrix3d& Je, const PositionJacobian& K);

/// tr(U (K1 J K1^T)^{-1} U^T) on the full 5x5 J, without forming the EFIM.
double speb_full_form(const Matrix5d& J, const PositionJacobian& K);

/// Known-gain SPEB via the FIM projected orthogonally to the gain constraint:
/// tr(U1 (K2 J K2^T)^{-1} U1^T).
double speb_known_gain_projected(const Matrix5d& J, const PositionJacobian& K, std::complex<double> h1);

/// Shorthand used by the optimizer: SPEB for B under model m.
double speb(const SensingModel& m, const BeamCovariance& B);

/// Trace of the inverse of a symmetric 2x2 matrix. Throws SingularEFIM when
/// it is not positive definite or its condition number exceeds 1e12.
double trace_inverse_2x2(const Eigen::Matrix2d& M);
long double trace_inverse_2x2_ext(const Eigen::Matrix<long double, 2, 2>& M);

}  // namespace bistatic
