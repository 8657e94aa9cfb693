#pragma once

#include <Eigen/Dense>
#include <array>

#include "tiltrotor/rigid_body.hpp"

namespace tiltrotor {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

/// Scale-free singularity floor on |det R| / prod ||row_i||.
inline constexpr double kDetFloor = 1e-9;

/// Virtual wrench command: body-z thrust (N, negative is up) and torques (N*m).
struct VirtualCommand {
  double T = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double u3 = 0.0;

  Vec4 as_vector() const { return {u1, u2, u3, T}; }  // mixer row order
};

/// Square map from squared rotor speeds to (u1, u2, u3, T) at one tilt.
struct MixerMatrix {
  Mat4 matrix = Mat4::Zero();
  double delta = 0.0;
  double determinant = 0.0;
  double normalized_determinant = 0.0;  // |det| / prod of row norms, in [0, 1]
};

/// Mixer for the plant's thrust (kt*Omega^2) and drag-torque (kd*Omega^2)
/// moments. Throws SingularMixerError when the normalized determinant is
/// at or below kDetFloor (tilt at or near pi/2).
MixerMatrix mixer(double delta, const VehicleParams& params);

/// Mixer without the singularity check.
Mat4 mixer_matrix(double delta, const VehicleParams& params);

/// Closed-form determinant of mixer_matrix:
///   8*c*d*kt^2 * (2*c*d*kd*kt + d^2*kt^2*s - kd^2*s).
double mixer_determinant(double delta, const VehicleParams& params);

/// Reference determinant expression for the square mixer:
///   8*d*kt^2 * (d^2*kt^2*s*c + d*kt*kd*c^2).
double reference_mixer_determinant(double delta, const VehicleParams& params);

/// Reference square mixer (entries differ from the plant's
/// moment model in the roll and pitch rows).
Mat4 reference_mixer_matrix(double delta, const VehicleParams& params);

struct AllocationResult {
  std::array<double, 4> omega{};     // rad/s
  Vec4 squared_speed = Vec4::Zero();  // unclamped solution
  Vec4 achieved = Vec4::Zero();       // mixer * clamped squares, (u1, u2, u3, T)
  bool saturated = false;
};

/// Solve the mixer for squared speeds; negative squares (and squares above
/// omega_max^2 when omega_max > 0) are clamped and flagged.
AllocationResult allocate(const VirtualCommand& cmd, double delta, const VehicleParams& params,
                          double omega_max = 0.0);

enum class TiltDirection { kConversion, kReconversion };

/// Symmetric trapezoidal tilt-rate profile between 0 (hover) and pi/2
/// (forward): constant acceleration `accel`, coast at the peak rate,
/// constant deceleration, over `duration` seconds from `t0`.
struct TiltSchedule {
  double accel = 4.0;     // |d2(delta)/dt2| during the ramps (rad/s^2)
  double duration = 10.0;  // s
  double t0 = 3.0;         // s
  TiltDirection direction = TiltDirection::kConversion;

  /// Throws InvalidScheduleError when the profile cannot sweep pi/2.
  void validate() const;
  double ramp_time() const;
  double peak_rate() const;
  double initial_delta() const;
  double terminal_delta() const;
};

struct TiltState {
  double delta = 0.0;
  double delta_dot = 0.0;
};

TiltState tilt_at(const TiltSchedule& schedule, double t);

/// Normalized control-surface deflections in [-1, 1].
struct SurfaceDeflection {
  double aileron = 0.0;
  double elevator = 0.0;
  double rudder = 0.0;

  Vec3 as_vector() const { return {aileron, elevator, rudder}; }
};

/// Forward-flight placeholder: deflection = clamp(u / authority, -1, 1).
/// `authority` is the surface torque at full deflection per axis (N*m).
SurfaceDeflection forward_mode_stub(const VirtualCommand& cmd, const Vec3& authority);

}  // namespace tiltrotor
