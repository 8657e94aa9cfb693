#include "tiltrotor/steso.hpp"

#include <cmath>

#include "tiltrotor/errors.hpp"
#include "tiltrotor/sliding.hpp"

namespace tiltrotor {

void ObserverGains::validate() const {
  if (!(h1 > 0.0 && h2 > 0.0 && h3 > 0.0)) {
    throw ConfigError("observer gains h1, h2, h3 must all be > 0");
  }
}

ObserverDerivative observer_derivative(const ObserverChannel& channel, double measured_angle,
                                       double gyro_coupling, double control_accel) {
  // Innovation taken as estimate minus measurement: with the minus-signed
  // corrections this yields the finite-time-stable error dynamics.
  const double err = channel.x1_hat - measured_angle;
  const ObserverGains& h = channel.gains;

  ObserverDerivative out;
  out.x1_dot = channel.x2_hat - h.h1 * sig(err, 2.0 / 3.0);
  out.x2_dot = channel.d_hat + gyro_coupling + control_accel - h.h2 * sig(err, 1.0 / 3.0);
  const double switching = channel.switching == ObserverSwitching::kSign
                               ? sign(err)
                               : sat(err, channel.sat_delta);
  out.d_dot = -h.h3 * switching;
  return out;
}

namespace {

// Root of z + a*sig^{2/3}(z) + b*sig^{1/3}(z) + c*sat(z, delta) = target, a
// strictly increasing odd function of z whose root satisfies |z| <= |target|.
double solve_innovation(double target, double a, double b, double c, double delta) {
  auto g = [&](double z) {
    return z + a * sig(z, 2.0 / 3.0) + b * sig(z, 1.0 / 3.0) + c * sat(z, delta);
  };
  double lo = -std::abs(target), hi = std::abs(target);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ObserverChannel observer_update(const ObserverChannel& channel, double measured_angle,
                                double gyro_coupling, double control_accel, double step) {
  const ObserverGains& g = channel.gains;
  const double h = step;
  const double a = h * g.h1;
  const double b = h * h * g.h2;
  const double jump = h * h * h * g.h3;
  // innovation predicted with the corrections switched off
  const double predicted = channel.x1_hat + h * channel.x2_hat +
                           h * h * (channel.d_hat + gyro_coupling + control_accel) -
                           measured_angle;

  double e = 0.0;
  double s = 0.0;
  if (channel.switching == ObserverSwitching::kSign) {
    if (std::abs(predicted) <= jump) {
      s = predicted / jump;
    } else {
      s = sign(predicted);
      e = solve_innovation(predicted - jump * s, a, b, 0.0, 1.0);
    }
  } else {
    e = solve_innovation(predicted, a, b, jump, channel.sat_delta);
    s = sat(e, channel.sat_delta);
  }

  ObserverChannel next = channel;
  next.d_hat = channel.d_hat - h * g.h3 * s;
  next.x2_hat = channel.x2_hat + h * (next.d_hat + gyro_coupling + control_accel) -
                h * g.h2 * sig(e, 1.0 / 3.0);
  next.x1_hat = channel.x1_hat + h * next.x2_hat - h * g.h1 * sig(e, 2.0 / 3.0);
  return next;
}

EstimationErrors estimation_errors(const ObserverChannel& channel, double true_angle,
                                   double true_rate, double true_disturbance) {
  return {true_angle - channel.x1_hat, true_rate - channel.x2_hat,
          true_disturbance - channel.d_hat};
}

}  // namespace tiltrotor
