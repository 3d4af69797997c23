#include <gtest/gtest.h>

#include <cmath>

#include "bistatic/array_manifold.hpp"
#include "bistatic/constants.hpp"
#include "bistatic/errors.hpp"
#include "support/generators.hpp"

using namespace bistatic;
using namespace bistatic::test_support;

namespace {

const double kLambda = kSpeedOfLight / 3.8e9;
const double kOmega = kTwoPi * 3.8e9;

double max_chord_error(const ArrayModel& a, double spacing) {
  double worst = 0.0;
  const int n = a.size();
  for (int k = 0; k < n; ++k) {
    const double d = (a.element_positions[(k + 1) % n] - a.element_positions[k]).norm();
    worst = std::max(worst, std::abs(d - spacing));
  }
  return worst;
}

Eigen::Vector2d centroid(const ArrayModel& a) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : a.element_positions) c += p;
  return c / a.size();
}

}  // namespace

TEST(BuildUca, TwoElements) {
  const ArrayModel a = build_uca(2, 0.3);
  EXPECT_NEAR((a.element_positions[0] - a.element_positions[1]).norm(), 0.3, 1e-15);
  EXPECT_NEAR(a.element_positions[0].norm(), 0.15, 1e-15);
}

TEST(BuildUca, SquareRadius) {
  const ArrayModel a = build_uca(4, 1.0);
  for (const auto& p : a.element_positions) EXPECT_NEAR(p.norm(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(uca_radius(4, 1.0), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(BuildUca, FifteenElementChords) {
  const ArrayModel a = build_uca(15, kLambda / 2);
  EXPECT_EQ(a.size(), 15);
  EXPECT_LT(max_chord_error(a, kLambda / 2), 1e-12);
}

TEST(BuildUca, CentroidAtOrigin) {
  for (int n = 1; n <= 16; ++n) {
    const ArrayModel a = build_uca(n, kLambda / 2, 0.3 * n);
    EXPECT_LT(centroid(a).norm(), 1e-12) << n;
    if (n >= 2) EXPECT_LT(max_chord_error(a, kLambda / 2), 1e-12) << n;
  }
}

TEST(BuildUca, SingleElementAtOrigin) {
  const ArrayModel a = build_uca(1, 0.1);
  ASSERT_EQ(a.size(), 1);
  EXPECT_EQ(a.element_positions[0], Eigen::Vector2d::Zero());
}

TEST(BuildUca, RejectsInvalidInput) {
  EXPECT_THROW(build_uca(0, 0.1), InvalidArray);
  EXPECT_THROW(build_uca(4, 0.0), InvalidArray);
  EXPECT_THROW(build_uca(4, -1.0), InvalidArray);
}

TEST(Steering, SingleElement) {
  const SteeringPair s = steering(build_uca(1, 0.1), 0.4, kOmega);
  ASSERT_EQ(s.a.size(), 1);
  EXPECT_EQ(s.a(0), cd(1.0, 0.0));
  EXPECT_EQ(s.a_dot(0), cd(0.0, 0.0));
  EXPECT_DOUBLE_EQ(s.norm_a, 1.0);
  EXPECT_DOUBLE_EQ(s.norm_a_dot, 0.0);
}

TEST(Steering, ElementFormula) {
  const ArrayModel a = build_uca(5, kLambda / 2);
  const double angle = -1.1;
  const SteeringPair s = steering(a, angle, kOmega);
  const Eigen::Vector2d er(std::cos(angle), std::sin(angle));
  for (int k = 0; k < 5; ++k) {
    const cd expected = std::exp(cd(0.0, kOmega / kSpeedOfLight * er.dot(a.element_positions[k])));
    EXPECT_NEAR(std::abs(s.a(k) - expected), 0.0, 1e-13);
  }
}

TEST(Steering, UnitModulusAndOrthogonality) {
  for (int n = 1; n <= 16; ++n) {
    const ArrayModel a = build_uca(n, kLambda / 2);
    for (int i = 0; i < 64; ++i) {
      const double angle = -kPi + kTwoPi * i / 64;
      const SteeringPair s = steering(a, angle, kOmega);
      EXPECT_NEAR(s.a.squaredNorm(), n, 1e-12);
      EXPECT_NEAR(s.norm_a, std::sqrt(double(n)), 1e-12);
      EXPECT_LE(std::abs(s.a.dot(s.a_dot)), 1e-9 * s.norm_a * std::max(s.norm_a_dot, 1e-300) + 1e-300)
          << "n=" << n << " angle=" << angle;
    }
  }
}

TEST(Steering, DerivativeMatchesFiniteDifference) {
  const ArrayModel a = build_uca(15, kLambda / 2);
  const double h = 1e-5;
  const SteeringPair s = steering(a, 0.7, kOmega);
  const Eigen::VectorXcd fd = (steering(a, 0.7 + h, kOmega).a - steering(a, 0.7 - h, kOmega).a) / (2 * h);
  EXPECT_LT((s.a_dot - fd).norm() / s.a_dot.norm(), 1e-6);
}

TEST(Steering, DerivativeUsesLocalAngle) {
  const ArrayModel rotated = build_uca(7, kLambda / 2, 0.5);
  const double h = 1e-5;
  const SteeringPair s = steering(rotated, 1.3, kOmega);
  const Eigen::VectorXcd fd = (steering(rotated, 1.3 + h, kOmega).a - steering(rotated, 1.3 - h, kOmega).a) / (2 * h);
  EXPECT_LT((s.a_dot - fd).norm() / s.a_dot.norm(), 1e-6);
}

TEST(Steering, DerivativeNormLinearInFrequency) {
  const ArrayModel a = build_uca(15, kLambda / 2);
  const double base = steering(a, 0.2, kOmega).norm_a_dot;
  for (double f : {0.5, 1.001, 2.0}) EXPECT_NEAR(steering(a, 0.2, f * kOmega).norm_a_dot, f * base, 1e-12 * base);
}

TEST(Steering, NarrowbandUsesCarrier) {
  const ArrayModel a = build_uca(8, kLambda / 2);
  const SteeringPair n = narrowband_steering(a, 0.9, kOmega);
  const SteeringPair w = steering(a, 0.9, kOmega);
  EXPECT_EQ(n.a, w.a);
  EXPECT_EQ(n.a_dot, w.a_dot);
}
