#include "tiltrotor/rigid_body.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tiltrotor/errors.hpp"

namespace tiltrotor {

namespace {

void check_pitch(double theta, const char* where) {
  if (!(std::abs(theta) < std::numbers::pi / 2.0 - kSingularityTolerance)) {
    std::ostringstream msg;
    msg << where << ": pitch " << theta << " rad is within " << kSingularityTolerance
        << " rad of the Euler singularity";
    throw SingularityError(msg.str());
  }
}

std::array<double, 4> thrusts(const RotorSet& rotors, double kt) {
  std::array<double, 4> t{};
  for (std::size_t i = 0; i < 4; ++i) t[i] = kt * rotors.omega[i] * rotors.omega[i];
  return t;
}

}  // namespace

StateVector BodyState::to_vector() const {
  StateVector x;
  x << u, v, w, p, q, r, phi, theta, psi, pn, pe, h;
  return x;
}

BodyState BodyState::from_vector(const StateVector& x) {
  return BodyState{x(0), x(1), x(2), x(3), x(4), x(5), x(6), x(7), x(8), x(9), x(10), x(11)};
}

bool BodyState::finite() const { return to_vector().allFinite(); }

void VehicleParams::validate() const {
  auto positive = [](double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ConfigError(std::string("vehicle parameter ") + name + " must be finite and > 0");
    }
  };
  positive(m, "m");
  positive(g, "g");
  positive(Ix, "Ix");
  positive(Iy, "Iy");
  positive(Iz, "Iz");
  positive(S, "S");
  positive(kt, "kt");
  positive(kd, "kd");
  positive(d_arm, "d_arm");
  positive(rho_air, "rho_air");
}

AirData air_data(const BodyState& state, double rho_air) {
  AirData air;
  air.airspeed = std::sqrt(state.u * state.u + state.v * state.v + state.w * state.w);
  air.qbar = 0.5 * rho_air * air.airspeed * air.airspeed;
  if (air.airspeed > 0.0) {
    air.alpha = std::atan2(state.w, state.u);
    air.beta = std::asin(std::clamp(state.v / air.airspeed, -1.0, 1.0));
  }
  return air;
}

Mat3 rotation_eb(double phi, double theta, double psi) {
  check_pitch(theta, "rotation_eb");
  const double cph = std::cos(phi), sph = std::sin(phi);
  const double cth = std::cos(theta), sth = std::sin(theta);
  const double cps = std::cos(psi), sps = std::sin(psi);
  Mat3 r;
  r << cth * cps, cth * sps, -sth,
      sth * cps * sph - sps * cph, sth * sps * sph + cps * cph, cth * sph,
      sth * cps * cph + sps * sph, sth * sps * cph - cps * sph, cth * cph;
  return r;
}

Mat3 rotor_rotation(int index, double delta) {
  if (index == 2 || index == 4) return Mat3::Identity();
  const double c = std::cos(delta), s = std::sin(delta);
  Mat3 r;
  r << c, 0.0, -s,
      0.0, 1.0, 0.0,
      s, 0.0, c;
  return r;
}

Vec3 gravity_force(const BodyState& state, const VehicleParams& params) {
  const double cth = std::cos(state.theta), sth = std::sin(state.theta);
  const double cph = std::cos(state.phi), sph = std::sin(state.phi);
  return Vec3{-sth, cth * sph, cth * cph} * (params.m * params.g);
}

Vec3 propulsive_force(const RotorSet& rotors, const VehicleParams& params) {
  const auto t = thrusts(rotors, params.kt);
  const double c = std::cos(rotors.delta), s = std::sin(rotors.delta);
  return {t[0] * s + t[2] * s, 0.0, -t[0] * c - t[1] - t[2] * c - t[3]};
}

Vec3 aero_force(const BodyState& state, const VehicleParams& params,
                const AeroCoefficients& aero) {
  const AirData air = air_data(state, params.rho_air);
  if (air.qbar == 0.0) return Vec3::Zero();
  return air.qbar * params.S *
         Vec3{-aero.Cx.eval(air, state), aero.Cy.eval(air, state), -aero.Cz.eval(air, state)};
}

Vec3 total_force(const BodyState& state, const RotorSet& rotors,
                 const VehicleParams& params, const AeroCoefficients& aero) {
  return gravity_force(state, params) + propulsive_force(rotors, params) +
         aero_force(state, params, aero);
}

Vec3 thrust_moment(const RotorSet& rotors, const VehicleParams& params) {
  const auto t = thrusts(rotors, params.kt);
  const double c = std::cos(rotors.delta), s = std::sin(rotors.delta);
  const double d = params.d_arm;
  return {-d * t[0] * c + d * t[1] + d * t[2] * c - d * t[3],
          d * t[0] * c - d * t[1] + d * t[2] * c - d * t[3],
          -d * t[0] * s + d * t[2] * s};
}

Vec3 drag_torque_moment(const RotorSet& rotors, const VehicleParams& params) {
  std::array<double, 4> tau{};
  for (std::size_t i = 0; i < 4; ++i) tau[i] = params.kd * rotors.omega[i] * rotors.omega[i];
  const double c = std::cos(rotors.delta), s = std::sin(rotors.delta);
  return {tau[0] * s - tau[2] * s, 0.0, -tau[0] * c - tau[1] + tau[2] * c + tau[3]};
}

Vec3 aero_moment(const BodyState& state, const VehicleParams& params,
                 const AeroCoefficients& aero) {
  const AirData air = air_data(state, params.rho_air);
  if (air.qbar == 0.0) return Vec3::Zero();
  return air.qbar * params.S *
         Vec3{aero.Cl.eval(air, state), aero.Cm.eval(air, state), aero.Cn.eval(air, state)};
}

Vec3 total_moment(const BodyState& state, const RotorSet& rotors,
                  const VehicleParams& params, const AeroCoefficients& aero) {
  return thrust_moment(rotors, params) + drag_torque_moment(rotors, params) +
         aero_moment(state, params, aero);
}

Vec3 euler_rates(const BodyState& state) {
  check_pitch(state.theta, "euler_rates");
  const double cph = std::cos(state.phi), sph = std::sin(state.phi);
  const double cth = std::cos(state.theta), tth = std::tan(state.theta);
  return {state.p + sph * tth * state.q + cph * tth * state.r,
          cph * state.q - sph * state.r,
          sph / cth * state.q + cph / cth * state.r};
}

Vec3 gyroscopic_coupling(const Vec3& rates, const VehicleParams& params) {
  const double p = rates.x(), q = rates.y(), r = rates.z();
  return {(params.Iy - params.Iz) / params.Ix * q * r,
          (params.Iz - params.Ix) / params.Iy * p * r,
          (params.Ix - params.Iy) / params.Iz * p * q};
}

Vec3 attitude_channel_accel(const Vec3& rates, const Vec3& torque, const Vec3& disturbance,
                            const VehicleParams& params) {
  return gyroscopic_coupling(rates, params) + torque.cwiseQuotient(params.inertia()) +
         disturbance;
}

BodyState state_derivative(const BodyState& state, const RotorSet& rotors,
                           const VehicleParams& params, const AeroCoefficients& aero,
                           const Vec3& disturbance, const Vec3& surface_moment) {
  const Vec3 force = total_force(state, rotors, params, aero);
  const Vec3 moment = total_moment(state, rotors, params, aero) + surface_moment;
  const double u = state.u, v = state.v, w = state.w;
  const double p = state.p, q = state.q, r = state.r;

  BodyState dx;
  dx.u = r * v - q * w + force.x() / params.m;
  dx.v = p * w - r * u + force.y() / params.m;
  dx.w = q * u - p * v + force.z() / params.m;

  const Vec3 body_accel = attitude_channel_accel(state.rates(), moment, disturbance, params);
  dx.p = body_accel.x();
  dx.q = body_accel.y();
  dx.r = body_accel.z();

  const Vec3 angle_rates = euler_rates(state);
  dx.phi = angle_rates.x();
  dx.theta = angle_rates.y();
  dx.psi = angle_rates.z();

  // Navigation block kept as given: row 1 middle entry reads sphi*stheta*cpsi - cphi*spsi.
  const double cph = std::cos(state.phi), sph = std::sin(state.phi);
  const double cth = std::cos(state.theta), sth = std::sin(state.theta);
  const double cps = std::cos(state.psi), sps = std::sin(state.psi);
  dx.pn = cth * cps * u + (sph * sth * cps - cph * sps) * v + (sph * sps + cph * sth * cps) * w;
  dx.pe = cth * sps * u + (sph * sth * sps + cph * cps) * v + (-sph * cps + cph * sth * sps) * w;
  dx.h = sth * u - sph * cth * v - cph * cth * w;
  return dx;
}

}  // namespace tiltrotor
