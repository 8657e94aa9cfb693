#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tiltrotor/errors.hpp"
#include "tiltrotor/rigid_body.hpp"

using namespace tiltrotor;

namespace {

constexpr double kPi = std::numbers::pi;

// Z-Y-X Euler rotation written out from elementary axis rotations.
Mat3 elementary_rotation(double phi, double theta, double psi) {
  Mat3 rx, ry, rz;
  rx << 1, 0, 0, 0, std::cos(phi), std::sin(phi), 0, -std::sin(phi), std::cos(phi);
  ry << std::cos(theta), 0, -std::sin(theta), 0, 1, 0, std::sin(theta), 0, std::cos(theta);
  rz << std::cos(psi), std::sin(psi), 0, -std::sin(psi), std::cos(psi), 0, 0, 0, 1;
  return rx * ry * rz;
}

BodyState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> vel(-20.0, 20.0), rate(-2.0, 2.0), ang(-1.2, 1.2);
  BodyState s;
  s.u = vel(rng);
  s.v = vel(rng);
  s.w = vel(rng);
  s.p = rate(rng);
  s.q = rate(rng);
  s.r = rate(rng);
  s.phi = ang(rng);
  s.theta = ang(rng);
  s.psi = 2.5 * ang(rng);
  return s;
}

}  // namespace

TEST_CASE("rotation_eb at zero angles is the identity") {
  CHECK((rotation_eb(0, 0, 0) - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rotation_eb yaw-only first row") {
  const Mat3 r = rotation_eb(0, 0, kPi / 6);
  CHECK(r(0, 0) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
  CHECK(r(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(r(0, 2)) < 1e-15);
}

TEST_CASE("rotation_eb is orthonormal and matches the elementary composition") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(-kPi, kPi), pitch(-1.4, 1.4);
  for (int k = 0; k < 1000; ++k) {
    const double phi = ang(rng), theta = pitch(rng), psi = ang(rng);
    const Mat3 r = rotation_eb(phi, theta, psi);
    CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((r - elementary_rotation(phi, theta, psi)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("rotation_eb refuses the pitch singularity") {
  CHECK_THROWS_AS(rotation_eb(0, kPi / 2, 0), SingularityError);
  CHECK_THROWS_AS(rotation_eb(0, -kPi / 2 + 5e-4, 0), SingularityError);
  CHECK_NOTHROW(rotation_eb(0, kPi / 2 - 2e-3, 0));
}

TEST_CASE("rotor_rotation") {
  for (double delta : {0.0, 0.3, 1.2, kPi / 2}) {
    CHECK(rotor_rotation(2, delta) == Mat3::Identity());
    CHECK(rotor_rotation(4, delta) == Mat3::Identity());
  }
  CHECK((rotor_rotation(1, 0.0) - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);
  const Vec3 thrust = rotor_rotation(1, kPi / 2) * Vec3(0, 0, -3.0);
  CHECK(thrust.x() == doctest::Approx(3.0));
  CHECK(std::abs(thrust.z()) < 1e-15);
}

TEST_CASE("forces at rest") {
  VehicleParams params;
  AeroCoefficients aero;
  aero.Cz.c0 = 0.7;
  BodyState s;
  RotorSet rotors;
  const Vec3 f = total_force(s, rotors, params, aero);
  CHECK(f.x() == 0.0);
  CHECK(f.y() == 0.0);
  CHECK(f.z() == doctest::Approx(58.86));
  CHECK(total_moment(s, rotors, params, aero).norm() == 0.0);

  s.theta = kPi / 2;
  const Vec3 g = gravity_force(s, params);
  CHECK(g.x() == doctest::Approx(-58.86));
  CHECK(std::abs(g.z()) < 1e-12);
}

TEST_CASE("propulsive force and moments with equal rotor speeds at zero tilt") {
  VehicleParams params;
  RotorSet rotors;
  rotors.omega = {700.0, 700.0, 700.0, 700.0};
  const Vec3 fp = propulsive_force(rotors, params);
  CHECK(fp.x() == 0.0);
  CHECK(fp.z() == doctest::Approx(-4.0 * params.kt * 700.0 * 700.0));
  CHECK(thrust_moment(rotors, params).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(drag_torque_moment(rotors, params).z()) < 1e-15);
}

TEST_CASE("rotor moments match per-rotor lever-arm sums") {
  // Rotor positions (x, y) in the body frame: 1 front-right, 2 rear-left,
  // 3 front-left, 4 rear-right; rotors 1 and 2 spin so that their drag
  // torque is -z in hover.
  VehicleParams params;
  params.kt = 2.3e-5;
  params.kd = 4.1e-7;
  params.d_arm = 0.37;
  const double d = params.d_arm;
  const std::array<Vec3, 4> pos{Vec3(d, d, 0), Vec3(-d, -d, 0), Vec3(d, -d, 0), Vec3(-d, d, 0)};
  const std::array<double, 4> spin{-1.0, -1.0, 1.0, 1.0};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> speed(0.0, 900.0), tilt(0.0, kPi / 2);
  for (int k = 0; k < 200; ++k) {
    RotorSet rotors;
    for (auto& w : rotors.omega) w = speed(rng);
    rotors.delta = tilt(rng);
    Vec3 force = Vec3::Zero(), thrust_m = Vec3::Zero(), drag_m = Vec3::Zero();
    for (int i = 0; i < 4; ++i) {
      const Mat3 r = rotor_rotation(i + 1, rotors.delta);
      const double w2 = rotors.omega[i] * rotors.omega[i];
      const Vec3 f = r * Vec3(0, 0, -params.kt * w2);
      force += f;
      thrust_m += pos[i].cross(f);
      drag_m += r * Vec3(0, 0, spin[i] * params.kd * w2);
    }
    CHECK((propulsive_force(rotors, params) - force).norm() < 1e-9 * (1 + force.norm()));
    CHECK((thrust_moment(rotors, params) - thrust_m).norm() < 1e-12 * (1 + thrust_m.norm()));
    CHECK((drag_torque_moment(rotors, params) - drag_m).norm() < 1e-12 * (1 + drag_m.norm()));
  }
}

TEST_CASE("zero airspeed gives no aerodynamic force or moment") {
  VehicleParams params;
  AeroCoefficients aero;
  aero.Cm.c0 = -0.2;
  aero.Cx.c0 = 0.1;
  BodyState s;
  s.p = 0.3;
  CHECK(aero_moment(s, params, aero).norm() == 0.0);
  CHECK(aero_force(s, params, aero).norm() == 0.0);
}

TEST_CASE("aerodynamic moment scales with dynamic pressure") {
  VehicleParams params;
  AeroCoefficients aero;
  aero.Cm.c0 = -0.01;
  aero.Cm.alpha = -0.5;
  BodyState s;
  s.u = 20.0;
  s.w = 2.0;
  const double v2 = 404.0;
  const double alpha = std::atan2(2.0, 20.0);
  const double expected = 0.5 * params.rho_air * v2 * params.S * (-0.01 - 0.5 * alpha);
  CHECK(aero_moment(s, params, aero).y() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("state_derivative examples") {
  VehicleParams params;
  AeroCoefficients aero;
  RotorSet rotors;
  BodyState s;
  s.p = 0.1;
  s.q = 0.2;
  s.r = 0.3;
  const BodyState dx = state_derivative(s, rotors, params, aero);
  CHECK(dx.phi == doctest::Approx(0.1));
  CHECK(dx.theta == doctest::Approx(0.2));
  CHECK(dx.psi == doctest::Approx(0.3));
  CHECK(dx.p == doctest::Approx((params.Iy - params.Iz) / params.Ix * 0.2 * 0.3));

  BodyState rest;
  const BodyState dx2 =
      state_derivative(rest, rotors, params, aero, Vec3::Zero(), Vec3(params.Ix, 0, 0));
  CHECK(dx2.p == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("angular block equals the simplified attitude channels") {
  VehicleParams params;
  AeroCoefficients aero;
  aero.Cl.beta = -0.05;
  aero.Cm.alpha = -0.3;
  aero.Cn.r = -0.02;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> speed(0.0, 900.0), tilt(0.0, 1.5), dist(-5.0, 5.0);
  for (int k = 0; k < 100; ++k) {
    const BodyState s = random_state(rng);
    RotorSet rotors;
    for (auto& w : rotors.omega) w = speed(rng);
    rotors.delta = tilt(rng);
    const Vec3 d(dist(rng), dist(rng), dist(rng));
    const BodyState dx = state_derivative(s, rotors, params, aero, d);
    const Vec3 moment = total_moment(s, rotors, params, aero);
    const double p = s.p, q = s.q, r = s.r;
    const Vec3 expected((params.Iy - params.Iz) * q * r / params.Ix + moment.x() / params.Ix + d.x(),
                        (params.Iz - params.Ix) * p * r / params.Iy + moment.y() / params.Iy + d.y(),
                        (params.Ix - params.Iy) * p * q / params.Iz + moment.z() / params.Iz + d.z());
    CHECK((Vec3(dx.p, dx.q, dx.r) - expected).norm() < 1e-12 * (1 + expected.norm()));
  }
}

TEST_CASE("Euler kinematics against the inverse map") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 100; ++k) {
    const BodyState s = random_state(rng);
    const Vec3 er = euler_rates(s);
    // body rates from Euler rates: p = phi' - sin(theta) psi', etc.
    const double cph = std::cos(s.phi), sph = std::sin(s.phi);
    const double cth = std::cos(s.theta), sth = std::sin(s.theta);
    const Vec3 body(er.x() - sth * er.z(), cph * er.y() + sph * cth * er.z(),
                    -sph * er.y() + cph * cth * er.z());
    CHECK((body - s.rates()).norm() < 1e-12);
  }
  BodyState bad;
  bad.theta = kPi / 2 - 1e-4;
  CHECK_THROWS_AS(euler_rates(bad), SingularityError);
}

TEST_CASE("forces and moments are continuous in tilt") {
  VehicleParams params;
  AeroCoefficients aero;
  BodyState s;
  RotorSet rotors;
  rotors.omega = {650.0, 720.0, 610.0, 700.0};
  const int n = 20000;
  Vec3 prev_f = total_force(s, rotors, params, aero), prev_m = total_moment(s, rotors, params, aero);
  double worst = 0.0;
  for (int i = 1; i <= n; ++i) {
    rotors.delta = (kPi / 2) * i / n;
    const Vec3 f = total_force(s, rotors, params, aero), m = total_moment(s, rotors, params, aero);
    worst = std::max({worst, (f - prev_f).norm(), (m - prev_m).norm()});
    prev_f = f;
    prev_m = m;
  }
  // Lipschitz bound: every term is at most kt*w^2*(1 + d) per unit of tilt
  const double bound = 4 * params.kt * 720.0 * 720.0 * (1 + params.d_arm) * (kPi / 2) / n;
  CHECK(worst <= bound);
}

TEST_CASE("vehicle parameter validation") {
  VehicleParams params;
  CHECK_NOTHROW(params.validate());
  params.kt = 0.0;
  CHECK_THROWS(params.validate());
  params = VehicleParams{};
  params.Iy = -1.0;
  CHECK_THROWS(params.validate());
}
