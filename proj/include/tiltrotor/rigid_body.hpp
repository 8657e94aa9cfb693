#pragma once

#include <Eigen/Dense>
#include <array>

namespace tiltrotor {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using StateVector = Eigen::Matrix<double, 12, 1>;

/// Distance from |theta| = pi/2 at which the Euler kinematics are refused.
inline constexpr double kSingularityTolerance = 1e-3;

/// Full rigid-body state: body velocities, body rates, Euler angles, position.
struct BodyState {
  double u = 0.0, v = 0.0, w = 0.0;        // m/s, body frame
  double p = 0.0, q = 0.0, r = 0.0;        // rad/s, body frame
  double phi = 0.0, theta = 0.0, psi = 0.0;  // rad
  double pn = 0.0, pe = 0.0, h = 0.0;      // m, world frame (h positive up)

  StateVector to_vector() const;
  static BodyState from_vector(const StateVector& x);

  Vec3 rates() const { return {p, q, r}; }
  Vec3 euler() const { return {phi, theta, psi}; }
  bool finite() const;
};

/// Airframe and rotor constants. Products of inertia are zero by construction.
struct VehicleParams {
  double m = 6.0;
  double g = 9.81;
  double Ix = 0.876;
  double Iy = 0.166;
  double Iz = 0.115;
  double S = 0.48;
  double cbar = 0.25;
  double span = 2.1;
  // Rotor constants are configuration defaults; allocation properties hold
  // for any positive values.
  double kt = 1.0e-5;
  double kd = 2.0e-7;
  double d_arm = 0.5;
  double rho_air = 1.225;

  Vec3 inertia() const { return {Ix, Iy, Iz}; }

  /// Throws ConfigError when a strictly positive constant is not.
  void validate() const;
};

/// Aerodynamic flow angles and dynamic pressure at the current state.
struct AirData {
  double airspeed = 0.0;  // V = |(u, v, w)|
  double alpha = 0.0;     // atan2(w, u)
  double beta = 0.0;      // asin(v / V), zero at rest
  double qbar = 0.0;      // 0.5 * rho * V^2
};

AirData air_data(const BodyState& state, double rho_air);

/// c0 + c_alpha*alpha + c_beta*beta + c_p*p + c_q*q + c_r*r
struct AffineCoefficient {
  double c0 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;

  double eval(const AirData& air, const BodyState& state) const {
    return c0 + alpha * air.alpha + beta * air.beta + p * state.p + q * state.q +
           r * state.r;
  }
};

/// Force (Cx, Cy, Cz) and moment (Cl, Cm, Cn) coefficients. All-zero by default.
struct AeroCoefficients {
  AffineCoefficient Cx, Cy, Cz;
  AffineCoefficient Cl, Cm, Cn;
};

/// Rotor speeds (rad/s) and front-rotor tilt (0 = hover, pi/2 = forward).
struct RotorSet {
  std::array<double, 4> omega{0.0, 0.0, 0.0, 0.0};
  double delta = 0.0;
};

/// Earth-to-body rotation. Throws SingularityError near |theta| = pi/2.
Mat3 rotation_eb(double phi, double theta, double psi);

/// Rotor-to-body rotation: identity for the rear rotors (2, 4), tilt about
/// the body y axis for the front rotors (1, 3). Index is 1-based.
Mat3 rotor_rotation(int index, double delta);

/// Gravity + rotor thrust + aerodynamic force in the body frame (N).
Vec3 gravity_force(const BodyState& state, const VehicleParams& params);
Vec3 propulsive_force(const RotorSet& rotors, const VehicleParams& params);
Vec3 aero_force(const BodyState& state, const VehicleParams& params,
                const AeroCoefficients& aero);
Vec3 total_force(const BodyState& state, const RotorSet& rotors,
                 const VehicleParams& params, const AeroCoefficients& aero);

/// Thrust moment, rotor drag-torque moment, and aerodynamic moment (N*m).
Vec3 thrust_moment(const RotorSet& rotors, const VehicleParams& params);
Vec3 drag_torque_moment(const RotorSet& rotors, const VehicleParams& params);
Vec3 aero_moment(const BodyState& state, const VehicleParams& params,
                 const AeroCoefficients& aero);
Vec3 total_moment(const BodyState& state, const RotorSet& rotors,
                  const VehicleParams& params, const AeroCoefficients& aero);

/// Euler-angle rates from body rates. Throws SingularityError near cos(theta) = 0.
Vec3 euler_rates(const BodyState& state);

/// Time derivative of the twelve-state rigid body.
///
/// `disturbance` is the lumped angular acceleration (rad/s^2) added to the
/// body-rate equations; `surface_moment` is the control-surface torque applied
/// in forward flight. Position kinematics follow the printed navigation block
/// (altitude positive up).
BodyState state_derivative(const BodyState& state, const RotorSet& rotors,
                           const VehicleParams& params, const AeroCoefficients& aero,
                           const Vec3& disturbance = Vec3::Zero(),
                           const Vec3& surface_moment = Vec3::Zero());

/// Simplified attitude channels: gyroscopic coupling + u/I + d per axis.
Vec3 gyroscopic_coupling(const Vec3& rates, const VehicleParams& params);
Vec3 attitude_channel_accel(const Vec3& rates, const Vec3& torque, const Vec3& disturbance,
                            const VehicleParams& params);

}  // namespace tiltrotor
