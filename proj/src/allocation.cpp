#include "tiltrotor/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tiltrotor/errors.hpp"

namespace tiltrotor {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
}

Mat4 mixer_matrix(double delta, const VehicleParams& params) {
  const double c = std::cos(delta), s = std::sin(delta);
  const double kt = params.kt, kd = params.kd, d = params.d_arm;
  Mat4 r;
  // columns: squared speeds of rotors 1..4; rows: roll, pitch, yaw, body-z force
  r << -d * kt * c + kd * s, d * kt, d * kt * c - kd * s, -d * kt,
      d * kt * c, -d * kt, d * kt * c, -d * kt,
      -d * kt * s - kd * c, -kd, d * kt * s + kd * c, kd,
      -kt * c, -kt, -kt * c, -kt;
  return r;
}

Mat4 reference_mixer_matrix(double delta, const VehicleParams& params) {
  const double c = std::cos(delta), s = std::sin(delta);
  const double kt = params.kt, kd = params.kd, d = params.d_arm;
  Mat4 r;
  r << -d * kt * c - kd * s, d * kt, d * kt * c - kd * s, -d * kt,
      d * kt * c, d * kt, -d * kt * c, -d * kt,
      -d * kt * s - kd * c, -kd, d * kt * s + kd * c, kd,
      -kt * c, -kt, -kt * c, -kt;
  return r;
}

double mixer_determinant(double delta, const VehicleParams& params) {
  const double c = std::cos(delta), s = std::sin(delta);
  const double kt = params.kt, kd = params.kd, d = params.d_arm;
  return 8.0 * c * d * kt * kt * (2.0 * c * d * kd * kt + d * d * kt * kt * s - kd * kd * s);
}

double reference_mixer_determinant(double delta, const VehicleParams& params) {
  const double c = std::cos(delta), s = std::sin(delta);
  const double kt = params.kt, kd = params.kd, d = params.d_arm;
  return 8.0 * d * kt * kt * (d * d * kt * kt * s * c + d * kt * kd * c * c);
}

MixerMatrix mixer(double delta, const VehicleParams& params) {
  MixerMatrix out;
  out.delta = delta;
  out.matrix = mixer_matrix(delta, params);
  out.determinant = mixer_determinant(delta, params);
  double row_product = 1.0;
  for (int i = 0; i < 4; ++i) row_product *= out.matrix.row(i).norm();
  out.normalized_determinant = std::abs(out.determinant) / row_product;
  if (!(out.normalized_determinant > kDetFloor)) {
    std::ostringstream msg;
    msg << "rotor mixer is singular at delta = " << delta
        << " rad (normalized determinant " << out.normalized_determinant << ")";
    throw SingularMixerError(msg.str());
  }
  return out;
}

namespace {

// The mixer decouples into two 2x2 blocks in the sums and differences of the
// front (1, 3) and rear (2, 4) squared speeds: pitch and thrust act on the
// sums, roll and yaw on the differences.
Vec4 solve_mixer(double delta, const VehicleParams& params, const Vec4& w) {
  const double c = std::cos(delta), s = std::sin(delta);
  const double kt = params.kt, kd = params.kd, dkt = params.d_arm * params.kt;
  const double a = dkt * c, b = kd * s, p = dkt * s + kd * c, q = kt * c;
  // [a, -dkt; -q, -kt] [F; R] = [pitch; force]
  const double det_sum = -a * kt - dkt * q;
  const double front_sum = (-kt * w(1) + dkt * w(3)) / det_sum;
  const double rear_sum = (a * w(3) + q * w(1)) / det_sum;
  // [a - b, dkt; p, -kd] [G; H] = [roll; yaw]
  const double det_diff = -(a - b) * kd - dkt * p;
  const double front_diff = (-kd * w(0) - dkt * w(2)) / det_diff;
  const double rear_diff = ((a - b) * w(2) - p * w(0)) / det_diff;
  return {0.5 * (front_sum - front_diff), 0.5 * (rear_sum + rear_diff),
          0.5 * (front_sum + front_diff), 0.5 * (rear_sum - rear_diff)};
}

}  // namespace

AllocationResult allocate(const VirtualCommand& cmd, double delta, const VehicleParams& params,
                          double omega_max) {
  const MixerMatrix mix = mixer(delta, params);
  AllocationResult out;
  out.squared_speed = solve_mixer(delta, params, cmd.as_vector());
  Vec4 clamped = out.squared_speed;
  const double upper = omega_max > 0.0 ? omega_max * omega_max : 0.0;
  for (int i = 0; i < 4; ++i) {
    if (clamped(i) < 0.0) {
      clamped(i) = 0.0;
      out.saturated = true;
    } else if (upper > 0.0 && clamped(i) > upper) {
      clamped(i) = upper;
      out.saturated = true;
    }
    out.omega[i] = std::sqrt(clamped(i));
  }
  out.achieved = mix.matrix * clamped;
  return out;
}

void TiltSchedule::validate() const {
  if (!(accel > 0.0) || !(duration > 0.0) || !std::isfinite(accel) || !std::isfinite(duration)) {
    throw InvalidScheduleError("tilt schedule needs accel > 0 and duration > 0");
  }
  // a*t_r*(D - t_r) = pi/2 must have a real root t_r <= D/2
  if (duration * duration < 2.0 * std::numbers::pi / accel) {
    std::ostringstream msg;
    msg << "tilt schedule with accel " << accel << " rad/s^2 cannot sweep pi/2 in " << duration
        << " s (needs duration >= " << std::sqrt(2.0 * std::numbers::pi / accel) << " s)";
    throw InvalidScheduleError(msg.str());
  }
}

double TiltSchedule::ramp_time() const {
  return 0.5 * (duration - std::sqrt(duration * duration - 2.0 * std::numbers::pi / accel));
}

double TiltSchedule::peak_rate() const { return accel * ramp_time(); }

double TiltSchedule::initial_delta() const {
  return direction == TiltDirection::kConversion ? 0.0 : kHalfPi;
}

double TiltSchedule::terminal_delta() const {
  return direction == TiltDirection::kConversion ? kHalfPi : 0.0;
}

TiltState tilt_at(const TiltSchedule& schedule, double t) {
  schedule.validate();
  const double tau = t - schedule.t0;
  if (tau <= 0.0) return {schedule.initial_delta(), 0.0};
  if (tau >= schedule.duration) return {schedule.terminal_delta(), 0.0};

  const double a = schedule.accel;
  const double tr = schedule.ramp_time();
  const double peak = a * tr;
  double progress = 0.0;
  double rate = 0.0;
  if (tau < tr) {
    progress = 0.5 * a * tau * tau;
    rate = a * tau;
  } else if (tau < schedule.duration - tr) {
    progress = 0.5 * a * tr * tr + peak * (tau - tr);
    rate = peak;
  } else {
    const double remaining = schedule.duration - tau;
    progress = kHalfPi - 0.5 * a * remaining * remaining;
    rate = a * remaining;
  }
  progress = std::clamp(progress, 0.0, kHalfPi);
  if (schedule.direction == TiltDirection::kConversion) return {progress, rate};
  return {kHalfPi - progress, -rate};
}

SurfaceDeflection forward_mode_stub(const VirtualCommand& cmd, const Vec3& authority) {
  auto deflect = [](double torque, double full_scale) {
    return std::clamp(torque / full_scale, -1.0, 1.0);
  };
  return {deflect(cmd.u1, authority.x()), deflect(cmd.u2, authority.y()),
          deflect(cmd.u3, authority.z())};
}

}  // namespace tiltrotor
