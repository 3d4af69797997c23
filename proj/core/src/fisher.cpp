#include "bistatic/fisher.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "bistatic/array_manifold.hpp"
#include "bistatic/constants.hpp"
#include "bistatic/errors.hpp"

namespace bistatic {

using cd = std::complex<double>;
constexpr cd kJ{0.0, 1.0};

double FisherBundle::peb() const { return std::sqrt(speb); }

namespace {

double manifold_omega(const Scenario& s, int p) {
  return s.narrowband ? s.omega_carrier : s.omega_carrier + s.subcarrier_offsets[p];
}

struct LinkVectors {
  SteeringPair tx;
  SteeringPair rx;
};

LinkVectors link_vectors(const Scenario& s, const GeometryState& g, int p) {
  const double w = manifold_omega(s, p);
  return {steering(s.tx_array, g.theta_t, w), steering(s.rx_array, g.theta_r, w)};
}

// Same null threshold as build_sensing_model.
bool has_derivative_direction(const SteeringPair& tx) {
  return tx.norm_a_dot > 1e-12 * std::sqrt(static_cast<double>(tx.a.size()));
}

// Inverse of a symmetric positive definite matrix after diagonal equilibration.
template <int N>
Eigen::Matrix<double, N, N> equilibrated_inverse(const Eigen::Matrix<double, N, N>& Y) {
  Eigen::Matrix<double, N, 1> d;
  for (int i = 0; i < N; ++i) {
    if (!(Y(i, i) > 0.0)) throw SingularEFIM("Fisher information has a non-positive diagonal entry");
    d(i) = 1.0 / std::sqrt(Y(i, i));
  }
  const Eigen::Matrix<double, N, N> Z = d.asDiagonal() * Y * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es(Z);
  const auto& ev = es.eigenvalues();
  if (!(ev(0) > 0.0) || ev(N - 1) / ev(0) > kSingularCondition) {
    throw SingularEFIM("Fisher information is singular");
  }
  const Eigen::Matrix<double, N, N> Zinv =
      es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  return d.asDiagonal() * Zinv * d.asDiagonal();
}

}  // namespace

double trace_inverse_2x2(const Eigen::Matrix2d& M) {
  return static_cast<double>(trace_inverse_2x2_ext(M.cast<long double>()));
}

long double trace_inverse_2x2_ext(const Eigen::Matrix<long double, 2, 2>& M) {
  const long double a = M(0, 0);
  const long double b = 0.5L * (M(0, 1) + M(1, 0));
  const long double c = M(1, 1);
  const long double mean = 0.5L * (a + c);
  const long double radius = std::hypot(0.5L * (a - c), b);
  const long double hi = mean + radius;
  // Smaller eigenvalue via det/hi to avoid cancellation.
  const long double det = a * c - b * b;
  const long double lo = hi > 0.0L ? det / hi : 0.0L;
  if (!(hi > 0.0L) || !(lo > 0.0L) || hi / lo > kSingularCondition) {
    std::ostringstream msg;
    msg << "position FIM is singular (eigenvalues " << static_cast<double>(lo) << ", " << static_cast<double>(hi)
        << ")";
    throw SingularEFIM(msg.str());
  }
  return (a + c) / det;
}

Eigen::MatrixXcd precoder(const Scenario& s, int p) {
  const GeometryState g = derive_geometry(s.tx_position, s.rx_position, s.target);
  const SteeringPair tx = steering(s.tx_array, g.theta_t, manifold_omega(s, p));
  const bool two = has_derivative_direction(tx);
  Eigen::MatrixXcd F(tx.a.size(), two ? 2 : 1);
  F.col(0) = tx.a.conjugate() / tx.norm_a;
  if (two) F.col(1) = tx.a_dot.conjugate() / tx.norm_a_dot;
  return F;
}

namespace {

template <typename T>
Eigen::Matrix<T, 5, 5> fim_entrywise_impl(const SensingModel& m, const BeamCovariance& B) {
  using C = std::complex<T>;
  const T nt = m.n_tx;
  const T nr = m.n_rx;
  const T sqrt_nt = std::sqrt(nt);

  // Quadratic forms of R_s[p] with the steering vector and its derivative
  // collapse to the entries of B_p once the precoder is aligned:
  //   a^T R a* = N_T b11,  a_dot^T R a_dot* = |a_dot|^2 b22,
  //   a_dot^T R a* = |a_dot| sqrt(N_T) b21.
  T s0 = 0, s1 = 0, s2 = 0, aoa = 0, aod = 0, cross_delay = 0;
  C cross{0, 0};
  for (int p = 0; p < m.subcarrier_count(); ++p) {
    const SubcarrierTerms& t = m.subcarriers[p];
    const T omega = t.omega;
    const T tx_norm = t.tx_deriv_norm;
    const T rx_norm = t.rx_deriv_norm;
    const T b11 = B[p](0, 0).real();
    const T b22 = B[p](1, 1).real();
    const C q_da = tx_norm * sqrt_nt * C(B[p](1, 0).real(), B[p](1, 0).imag());
    const T q_aa = nt * b11;
    s0 += q_aa;
    s1 += omega * q_aa;
    s2 += omega * omega * q_aa;
    aoa += rx_norm * rx_norm * q_aa;
    aod += tx_norm * tx_norm * b22;
    cross += q_da;
    cross_delay += omega * q_da.imag();
  }

  const T k = T(2) / T(m.noise_variance);
  const C h(m.h1.real(), m.h1.imag());
  const T h2 = std::norm(h);
  const C hc = h * cross;

  Eigen::Matrix<T, 5, 5> J = Eigen::Matrix<T, 5, 5>::Zero();
  J(0, 0) = J(1, 1) = k * nr * s0;
  J(0, 2) = k * nr * h.imag() * s1;
  J(1, 2) = -k * nr * h.real() * s1;
  J(0, 3) = k * nr * hc.real();
  J(1, 3) = k * nr * hc.imag();
  J(2, 2) = k * nr * h2 * s2;
  J(2, 3) = -k * nr * h2 * cross_delay;
  J(3, 3) = k * nr * h2 * aod;
  J(4, 4) = k * h2 * aoa;
  // j15 = j25 = j35 = j45 = 0: the arrival angle decouples.
  J.template triangularView<Eigen::StrictlyLower>() = J.transpose().template triangularView<Eigen::StrictlyLower>();
  return J;
}

}  // namespace

Matrix5d fim_entrywise(const SensingModel& m, const BeamCovariance& B) { return fim_entrywise_impl<double>(m, B); }

XformPair xform_matrices(const SensingModel& m, int p) {
  const SubcarrierTerms& t = m.subcarriers[p];
  const double snt = std::sqrt(static_cast<double>(m.n_tx));
  const double snr = std::sqrt(static_cast<double>(m.n_rx));
  XformPair x;
  x.rx.setZero();
  x.tx.setZero();
  x.rx(4, 0) = snt * t.rx_deriv_norm;
  x.tx(0, 0) = snr * snt;
  x.tx(1, 0) = kJ * snr * snt;
  x.tx(2, 0) = -kJ * m.h1 * t.omega * snr * snt;
  x.tx(3, 1) = m.h1 * t.tx_deriv_norm * snr;
  return x;
}

Matrix5d fim_xform(const SensingModel& m, const BeamCovariance& B) {
  const double h2 = std::norm(m.h1);
  Eigen::Matrix<cd, 5, 5> acc = Eigen::Matrix<cd, 5, 5>::Zero();
  for (int p = 0; p < m.subcarrier_count(); ++p) {
    const XformPair x = xform_matrices(m, p);
    acc += h2 * x.rx * B[p] * x.rx.adjoint() + x.tx * B[p] * x.tx.adjoint();
  }
  return (2.0 / m.noise_variance) * acc.real();
}

PilotSet realize_pilots(const Scenario& s, const BeamCovariance& B) {
  PilotSet pilots;
  pilots.per_subcarrier.resize(s.subcarrier_offsets.size());
  for (int p = 0; p < s.subcarrier_count(); ++p) {
    const Eigen::MatrixXcd F = precoder(s, p);
    if (F.cols() == 1) {
      const double power = B[p](0, 0).real();
      if (power > 0.0) pilots.per_subcarrier[p].push_back(std::sqrt(power) * F.col(0));
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Block> es(B[p]);
    for (int i = 0; i < 2; ++i) {
      const double lambda = es.eigenvalues()(i);
      if (lambda <= 0.0) continue;
      pilots.per_subcarrier[p].push_back(std::sqrt(lambda) * (F * es.eigenvectors().col(i)));
    }
  }
  return pilots;
}

Matrix5d fim_from_derivatives(const Scenario& s, const PilotSet& pilots) {
  const GeometryState g = derive_geometry(s.tx_position, s.rx_position, s.target);
  const cd h = channel_coefficient(s, g);
  Eigen::Matrix<cd, 5, 5> acc = Eigen::Matrix<cd, 5, 5>::Zero();

  for (int p = 0; p < s.subcarrier_count() && p < static_cast<int>(pilots.per_subcarrier.size()); ++p) {
    const LinkVectors v = link_vectors(s, g, p);
    const double w = s.subcarrier_offsets[p];
    const cd phase = std::exp(-kJ * w * g.tau);
    for (const Eigen::VectorXcd& x : pilots.per_subcarrier[p]) {
      const cd gain = v.tx.a.transpose() * x;
      const cd gain_dot = v.tx.a_dot.transpose() * x;
      // Derivatives of m[p] = h1 a_R a_T^T e^{-j w tau} s[p].
      Eigen::Matrix<cd, Eigen::Dynamic, 5> D(v.rx.a.size(), 5);
      D.col(0) = v.rx.a * gain * phase;
      D.col(1) = kJ * D.col(0);
      D.col(2) = -kJ * w * h * D.col(0);
      D.col(3) = h * v.rx.a * gain_dot * phase;
      D.col(4) = h * v.rx.a_dot * gain * phase;
      acc += D.adjoint() * D;
    }
  }
  return (2.0 / s.noise_variance) * acc.real();
}

FisherBundle make_bundle(const Matrix5d& J, const PositionJacobian& K, cd h1) {
  FisherBundle b;
  b.J = J;
  b.K = K;
  b.J11 = J.topLeftCorner<2, 2>();
  b.J12 = J.topRightCorner<2, 3>();
  b.J22 = J.bottomRightCorner<3, 3>();

  const double det11 = b.J11.determinant();
  if (!(b.J11(0, 0) > 0.0) || !(det11 > 0.0)) {
    throw SingularEFIM("no power directed towards the scatterer; channel coefficient unidentifiable");
  }
  const Eigen::Matrix2d J11inv = b.J11.inverse();
  b.Je = b.J22 - b.J12.transpose() * J11inv * b.J12;

  const double mag = std::abs(h1);
  if (!(mag > 0.0)) throw InvalidArgument("known-gain bound needs |h1| > 0");
  const Eigen::Vector2d u(-h1.imag() / mag, h1.real() / mag);
  const Eigen::Vector3d r = b.J12.transpose() * u;
  const double uju = u.dot(b.J11 * u);
  b.Jeh = b.J22 - r * r.transpose() / uju;
  b.known_gain_aod_term = r(1) * r(1) / uju;

  b.speb = speb_from_efim(b.Je, K);
  b.speb_known_gain = speb_from_efim(b.Jeh, K);
  return b;
}

FisherBundle fisher_bundle(const SensingModel& m, const BeamCovariance& B) {
  return make_bundle(fim_entrywise(m, B), m.geometry.K, m.h1);
}

double speb_from_efim(const Eigen::Matrix3d& Je, const PositionJacobian& K) {
  const Eigen::Matrix<long double, 2, 3> Kx = K.cast<long double>();
  return static_cast<double>(trace_inverse_2x2_ext(Kx * Je.cast<long double>() * Kx.transpose()));
}

double speb_full_form(const Matrix5d& J, const PositionJacobian& K) {
  Eigen::Matrix<double, 4, 5> K1 = Eigen::Matrix<double, 4, 5>::Zero();
  K1.topLeftCorner<2, 2>().setIdentity();
  K1.bottomRightCorner<2, 3>() = K;
  const Eigen::Matrix4d Y = K1 * J * K1.transpose();
  const Eigen::Matrix4d Yinv = equilibrated_inverse<4>(0.5 * (Y + Y.transpose()));
  return Yinv(2, 2) + Yinv(3, 3);
}

double speb_known_gain_projected(const Matrix5d& J, const PositionJacobian& K, cd h1) {
  const double mag = std::abs(h1);
  if (!(mag > 0.0)) throw InvalidArgument("known-gain bound needs |h1| > 0");
  Eigen::Matrix<double, 3, 5> K2 = Eigen::Matrix<double, 3, 5>::Zero();
  K2(0, 0) = -h1.imag() / mag;
  K2(0, 1) = h1.real() / mag;
  K2.bottomRightCorner<2, 3>() = K;
  const Eigen::Matrix3d Y = K2 * J * K2.transpose();
  const Eigen::Matrix3d Yinv = equilibrated_inverse<3>(0.5 * (Y + Y.transpose()));
  return Yinv(1, 1) + Yinv(2, 2);
}

double speb(const SensingModel& m, const BeamCovariance& B) {
  // Extended precision throughout: the optimizer compares objective values
  // far below the cancellation error of det(K Je K^T) in double.
  using Real = long double;
  const Eigen::Matrix<Real, 5, 5> J = fim_entrywise_impl<Real>(m, B);
  const Real j11 = J(0, 0);
  if (!(j11 > 0)) throw SingularEFIM("no power directed towards the scatterer");
  const Eigen::Matrix<Real, 2, 3> J12 = J.template topRightCorner<2, 3>();
  const Eigen::Matrix<Real, 3, 3> Je = J.template bottomRightCorner<3, 3>() - J12.transpose() * J12 / j11;
  const Eigen::Matrix<Real, 2, 3> K = m.geometry.K.cast<Real>();
  return static_cast<double>(trace_inverse_2x2_ext(K * Je * K.transpose()));
}

}  // namespace bistatic
