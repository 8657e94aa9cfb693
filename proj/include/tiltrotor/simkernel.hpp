#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tiltrotor/allocation.hpp"
#include "tiltrotor/arsmc.hpp"
#include "tiltrotor/rigid_body.hpp"
#include "tiltrotor/steso.hpp"

namespace tiltrotor {

/// One additive term of a disturbance profile (rad/s^2 per axis).
struct DisturbanceTerm {
  enum class Kind { kConstant, kWindowedSine };
  Kind kind = Kind::kConstant;
  Vec3 amplitude = Vec3::Zero();
  double omega = 0.0;  // rad/s, sine only
  // Active on [t_on, t_off]; the sine phase is measured from t_on.
  double t_on = 0.0;
  double t_off = 1e300;

  Vec3 at(double t) const;
};

/// Sum of terms; an empty profile is the zero disturbance.
struct DisturbanceProfile {
  std::vector<DisturbanceTerm> terms;

  /// A*sin(omega*(t - t_on)) on [t_on, t_off] for every axis, zero elsewhere.
  static DisturbanceProfile windowed_sine(double amplitude, double omega, double t_on,
                                          double t_off);
  /// The 5*sin(pi*(t - 9)) pulse on 9 <= t <= 11 s applied to all three axes.
  static DisturbanceProfile reference_pulse();
};

Vec3 disturbance_at(const DisturbanceProfile& profile, double t);

/// One classical RK4 step of the rigid body alone with rotors, disturbance
/// and surface moment held constant (the scheme the closed loop uses).
BodyState plant_rk4_step(const BodyState& state, const RotorSet& rotors,
                         const VehicleParams& params, const AeroCoefficients& aero,
                         const Vec3& disturbance, double step);

/// Rotor thrust policy during rotor-borne flight.
enum class ThrustPolicy {
  kConstantHover,  // T = -m*g
  kTiltShare,      // T = -m*g*cos(delta): the wing carries the rest
};

struct PhaseWindows {
  std::array<double, 2> conversion{3.0, 13.0};
  std::array<double, 2> reconversion{20.0, 22.0};
};

struct ScenarioConfig {
  static constexpr const char* kSchema = "tiltrotor-scenario/1";

  std::string name = "default";
  double duration = 24.0;
  double step = 1e-3;

  BodyState initial;
  AttitudeReference reference;

  ControllerKind controller = ControllerKind::kSac;
  ControllerConfig sac;
  ControllerConfig rsmc;
  ControllerConfig ftsmc;

  std::array<ObserverGains, 3> observer{};
  ObserverSwitching observer_switching = ObserverSwitching::kSign;
  double observer_sat_delta = 0.01;

  TiltSchedule conversion;
  TiltSchedule reconversion;
  PhaseWindows windows;

  ThrustPolicy thrust_policy = ThrustPolicy::kTiltShare;
  double omega_max = 0.0;           // rad/s, 0 disables the upper clamp
  double forward_tilt_margin = 1e-3;  // rotor mixer is used while delta < pi/2 - margin
  double forward_thrust = -1.0;     // N on the front rotors in forward flight; < 0: m*g/2
  Vec3 surface_authority{5.0, 5.0, 5.0};

  DisturbanceProfile disturbance;

  VehicleParams vehicle;
  AeroCoefficients aero;

  // Measurement noise on the sensed Euler angles (rad, 1-sigma), off by default.
  Vec3 angle_noise_std = Vec3::Zero();
  std::uint64_t seed = 0;

  /// The configuration of the selected controller.
  const ControllerConfig& active_controller() const;
  ControllerConfig& controller_config(ControllerKind kind);
  const ControllerConfig& controller_config(ControllerKind kind) const;

  /// Step count over the run (duration / step rounded to nearest).
  std::size_t step_count() const;

  /// Throws ConfigError on invalid values.
  void validate() const;
};

/// Reference test conditions with this project's frozen gain sets.
ScenarioConfig default_scenario();

/// One row of the simulation trace.
struct TraceRecord {
  double t = 0.0;
  BodyState state;
  Vec3 x1_hat = Vec3::Zero();
  Vec3 x2_hat = Vec3::Zero();
  Vec3 d_hat = Vec3::Zero();
  Vec3 d_injected = Vec3::Zero();
  Vec3 d_lumped = Vec3::Zero();  // (applied moment - achieved torque)/I + injected
  Vec3 error = Vec3::Zero();     // measured angle - reference (rad)
  Vec3 sigma = Vec3::Zero();
  Vec3 s = Vec3::Zero();
  Vec3 s_dot = Vec3::Zero();
  Vec3 eta = Vec3::Zero();
  Vec3 xi1 = Vec3::Zero();
  Vec3 xi2 = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  double thrust = 0.0;
  std::array<double, 4> omega{};
  double delta = 0.0;
  double delta_dot = 0.0;
  Vec3 deflection = Vec3::Zero();
  bool saturated = false;
  bool forward_mode = false;

  static const std::vector<std::string>& columns();
  std::vector<double> to_row() const;
  static TraceRecord from_row(const std::vector<double>& row);

  bool operator==(const TraceRecord& other) const;
};

struct SimTrace {
  std::string controller;
  double step = 0.0;
  std::vector<TraceRecord> records;

  bool operator==(const SimTrace& other) const = default;
};

/// Fixed-step closed loop of plant, observer, controller and allocation.
///
/// Each step: read the sensors, advance the observer with the new sample, form
/// the controller torque from the observer estimates, evaluate the tilt
/// schedule, allocate rotor speeds (or surface deflections in forward flight),
/// then advance plant + controller integrals together with classical RK4 while
/// the actuator commands are held.
class Simulator {
 public:
  explicit Simulator(ScenarioConfig config);

  double time() const { return time_; }
  std::size_t steps_taken() const { return steps_; }
  const BodyState& state() const { return plant_; }
  const AttitudeObserver& observer() const { return observer_; }
  const AttitudeController& controller() const { return *controller_; }
  const SimTrace& trace() const { return trace_; }

  /// Advance one step and append the new record. Numerical failures are
  /// rethrown with the offending time in the message.
  void step_once();

  /// Run to the configured duration and return the trace.
  const SimTrace& run();

 private:
  struct Actuation {
    ControlInput input;
    Vec3 torque = Vec3::Zero();
    Vec3 achieved = Vec3::Zero();  // torque realized by the clamped actuators
    double thrust = 0.0;
    RotorSet rotors;
    TiltState tilt;
    Vec3 surface_moment = Vec3::Zero();
    Vec3 deflection = Vec3::Zero();
    bool saturated = false;
    bool forward_mode = false;
  };

  using Augmented = Eigen::Matrix<double, 21, 1>;

  Actuation actuate(bool advance_observer);
  ControlInput sense(const BodyState& plant, const Vec3& angle_noise) const;
  TiltState scheduled_tilt(double t) const;
  Augmented pack() const;
  void unpack(const Augmented& x);
  Augmented derivative(double t, const Augmented& x, const Actuation& act) const;
  void record(const Actuation& act);

  ScenarioConfig config_;
  std::unique_ptr<AttitudeController> controller_;
  BodyState plant_;
  AttitudeObserver observer_{};
  double time_ = 0.0;
  std::size_t steps_ = 0;
  Vec3 noise_ = Vec3::Zero();
  std::mt19937_64 rng_;
  Actuation pending_;
  SimTrace trace_;
};

/// Run one scenario to completion.
SimTrace run(const ScenarioConfig& config);

}  // namespace tiltrotor
