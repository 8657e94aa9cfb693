#pragma once

#include <array>

namespace tiltrotor {

/// Super-twisting observer gains.
struct ObserverGains {
  double h1 = 30.0;
  double h2 = 300.0;
  double h3 = 1000.0;

  void validate() const;
};

/// How the disturbance-estimate update treats the output error.
enum class ObserverSwitching {
  kSign,        // -h3 * sign(e)
  kSaturation,  // -h3 * sat(e / delta)
};

/// One attitude axis of the super-twisting extended state observer.
struct ObserverChannel {
  double x1_hat = 0.0;  // angle estimate (rad)
  double x2_hat = 0.0;  // rate estimate (rad/s)
  double d_hat = 0.0;   // lumped disturbance estimate (rad/s^2)
  ObserverGains gains;
  ObserverSwitching switching = ObserverSwitching::kSign;
  double sat_delta = 0.01;  // boundary for kSaturation
};

struct ObserverDerivative {
  double x1_dot = 0.0;
  double x2_dot = 0.0;
  double d_dot = 0.0;
};

/// Observer right-hand side with innovation e = x1_hat - measured_angle:
///   x1_hat' = x2_hat - h1*sig^{2/3}(e)
///   x2_hat' = d_hat + gyro_coupling + control_accel - h2*sig^{1/3}(e)
///   d_hat'  = -h3*sign(e)   (or -h3*sat(e) with kSaturation)
///
/// `gyro_coupling` is the known cross-coupling acceleration of the axis
/// (e.g. (Iy - Iz)/Ix * q * r for roll), `control_accel` is u / I.
ObserverDerivative observer_derivative(const ObserverChannel& channel, double measured_angle,
                                       double gyro_coupling, double control_accel);

/// One sampling period of the observer in discrete time.
///
/// The correction terms are evaluated at the end of the period (implicit
/// Euler in the innovation), with the set-valued sign resolved exactly:
///   x2_hat+ = x2_hat + h*(d_hat+ + gyro_coupling + control_accel) - h*h2*sig^{1/3}(e+)
///   x1_hat+ = x1_hat + h*x2_hat+ - h*h1*sig^{2/3}(e+)
///   d_hat+  = d_hat - h*h3*s,  s in Sgn(e+)
/// with e+ = x1_hat+ - measured_angle. Explicit integration of the sign term
/// locks d_hat at offsets of order h3*h; this form has the same fixed points
/// as the continuous observer and reaches them without chattering.
ObserverChannel observer_update(const ObserverChannel& channel, double measured_angle,
                                double gyro_coupling, double control_accel, double step);

struct EstimationErrors {
  double angle = 0.0;
  double rate = 0.0;
  double disturbance = 0.0;
};

/// true - estimate, componentwise.
EstimationErrors estimation_errors(const ObserverChannel& channel, double true_angle,
                                   double true_rate, double true_disturbance);

/// Three independent observer channels (roll, pitch, yaw).
using AttitudeObserver = std::array<ObserverChannel, 3>;

}  // namespace tiltrotor
