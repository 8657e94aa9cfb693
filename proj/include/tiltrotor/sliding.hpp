#pragma once

#include <cmath>

namespace tiltrotor {

/// Signum with sign(0) = 0.
inline double sign(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0;
}

/// Odd power |x|^a * sign(x); sig^a(0) = 0 for every a > 0.
inline double sig(double x, double a) {
  if (x == 0.0) return 0.0;
  return std::pow(std::abs(x), a) * sign(x);
}

/// Boundary-layer saturation: x/delta inside |x| <= delta, +-1 outside.
inline double sat(double x, double delta) {
  if (x > delta) return 1.0;
  if (x < -delta) return -1.0;
  return x / delta;
}

}  // namespace tiltrotor
