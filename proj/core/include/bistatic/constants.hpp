#pragma once

#include <numbers>

namespace bistatic {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Points closer than this are treated as coincident.
inline constexpr double kDegenerateDistance = 1e-9;  // m

/// Condition number above which the 2x2 position FIM is declared singular.
inline constexpr double kSingularCondition = 1e12;

}  // namespace bistatic
