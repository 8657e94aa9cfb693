#include "tiltrotor/simkernel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tiltrotor/errors.hpp"

namespace tiltrotor {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
// A sensed attitude beyond this magnitude (rad) is treated as divergence.
constexpr double kDivergenceAngle = 10.0;

std::string at_time(double t, const std::string& what) {
  std::ostringstream msg;
  msg.precision(6);
  msg << "t = " << std::fixed << t << " s: " << what;
  return msg.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Disturbance

Vec3 DisturbanceTerm::at(double t) const {
  if (t < t_on || t > t_off) return Vec3::Zero();
  switch (kind) {
    case Kind::kConstant:
      return amplitude;
    case Kind::kWindowedSine:
      return amplitude * std::sin(omega * (t - t_on));
  }
  return Vec3::Zero();
}

DisturbanceProfile DisturbanceProfile::windowed_sine(double amplitude, double omega, double t_on,
                                                     double t_off) {
  DisturbanceTerm term;
  term.kind = DisturbanceTerm::Kind::kWindowedSine;
  term.amplitude = Vec3::Constant(amplitude);
  term.omega = omega;
  term.t_on = t_on;
  term.t_off = t_off;
  return DisturbanceProfile{{term}};
}

DisturbanceProfile DisturbanceProfile::reference_pulse() {
  return windowed_sine(5.0, std::numbers::pi, 9.0, 11.0);
}

Vec3 disturbance_at(const DisturbanceProfile& profile, double t) {
  Vec3 d = Vec3::Zero();
  for (const auto& term : profile.terms) d += term.at(t);
  return d;
}

// ---------------------------------------------------------------------------
// Scenario

const ControllerConfig& ScenarioConfig::active_controller() const {
  return controller_config(controller);
}

ControllerConfig& ScenarioConfig::controller_config(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kSac:
      return sac;
    case ControllerKind::kRsmc:
      return rsmc;
    case ControllerKind::kFtsmc:
      return ftsmc;
  }
  throw ConfigError("unknown controller kind");
}

const ControllerConfig& ScenarioConfig::controller_config(ControllerKind kind) const {
  return const_cast<ScenarioConfig*>(this)->controller_config(kind);
}

std::size_t ScenarioConfig::step_count() const {
  return static_cast<std::size_t>(std::llround(duration / step));
}

void ScenarioConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("step must be > 0");
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw ConfigError("duration must be >= 0");
  }
  if (duration > 0.0 && duration < step) throw ConfigError("duration must be >= step");
  if (!initial.finite()) throw ConfigError("initial state must be finite");
  if (std::abs(initial.theta) >= kHalfPi - kSingularityTolerance) {
    throw ConfigError("initial pitch must be away from +-90 deg");
  }
  vehicle.validate();
  sac.validate();
  rsmc.validate();
  ftsmc.validate();
  for (const auto& g : observer) g.validate();
  if (!(observer_sat_delta > 0.0)) throw ConfigError("observer sat boundary must be > 0");
  try {
    conversion.validate();
    reconversion.validate();
  } catch (const InvalidScheduleError& e) {
    throw ConfigError(e.what());
  }
  if (conversion.direction != TiltDirection::kConversion ||
      reconversion.direction != TiltDirection::kReconversion) {
    throw ConfigError("tilt schedule directions are conversion then reconversion");
  }
  if (conversion.t0 + conversion.duration > reconversion.t0) {
    throw ConfigError("reconversion must start after conversion ends");
  }
  const auto& w = windows;
  if (!(0.0 <= w.conversion[0] && w.conversion[0] < w.conversion[1] &&
        w.conversion[1] <= w.reconversion[0] && w.reconversion[0] < w.reconversion[1])) {
    throw ConfigError("phase windows must be ordered and non-overlapping");
  }
  if (!(omega_max >= 0.0)) throw ConfigError("omega_max must be >= 0");
  if (!(forward_tilt_margin > 0.0 && forward_tilt_margin < kHalfPi)) {
    throw ConfigError("forward_tilt_margin must be in (0, pi/2)");
  }
  if (!((surface_authority.array() > 0.0).all())) {
    throw ConfigError("surface authority must be > 0");
  }
  if (!((angle_noise_std.array() >= 0.0).all())) {
    throw ConfigError("angle noise standard deviation must be >= 0");
  }
  for (const auto& term : disturbance.terms) {
    if (!term.amplitude.allFinite() || !std::isfinite(term.omega) || !(term.t_on <= term.t_off)) {
      throw ConfigError("disturbance terms need finite amplitude and t_on <= t_off");
    }
  }
}

BodyState plant_rk4_step(const BodyState& state, const RotorSet& rotors,
                         const VehicleParams& params, const AeroCoefficients& aero,
                         const Vec3& disturbance, double step) {
  auto f = [&](const StateVector& x) {
    return state_derivative(BodyState::from_vector(x), rotors, params, aero, disturbance)
        .to_vector();
  };
  const StateVector x0 = state.to_vector();
  const StateVector k1 = f(x0);
  const StateVector k2 = f(x0 + 0.5 * step * k1);
  const StateVector k3 = f(x0 + 0.5 * step * k2);
  const StateVector k4 = f(x0 + step * k3);
  return BodyState::from_vector(x0 + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

ScenarioConfig default_scenario() {
  constexpr double kDeg = std::numbers::pi / 180.0;
  ScenarioConfig cfg;
  cfg.initial.phi = 0.57 * kDeg;
  cfg.initial.theta = 0.57 * kDeg;
  cfg.initial.psi = 1.14 * kDeg;

  cfg.sac.kind = ControllerKind::kSac;
  cfg.rsmc.kind = ControllerKind::kRsmc;
  cfg.ftsmc.kind = ControllerKind::kFtsmc;
  for (int i = 0; i < 3; ++i) {
    auto& f = cfg.ftsmc.ftsmc[i];
    f.k_lin = 1.15;
    f.k_term = 1.0;
    f.k_s = 400.0;
    f.k_w = 0.5;
    cfg.rsmc.surface[i].k_lin = 0.8;
    cfg.rsmc.surface[i].k_term = 1.0;
    cfg.rsmc.adaptation[i].xi1_init = 20.0;
    cfg.rsmc.adaptation[i].xi2_init = 20.0;
  }

  cfg.aero.Cx.c0 = 0.05;
  cfg.aero.Cz.c0 = 0.3;
  cfg.aero.Cz.alpha = 4.5;
  cfg.aero.Cm.c0 = -0.003;
  cfg.aero.Cm.alpha = -0.05;
  cfg.aero.Cm.q = -0.01;

  cfg.conversion.t0 = 3.0;
  cfg.conversion.duration = 10.0;
  cfg.conversion.direction = TiltDirection::kConversion;
  cfg.reconversion.t0 = 20.0;
  cfg.reconversion.duration = 2.0;
  cfg.reconversion.direction = TiltDirection::kReconversion;
  return cfg;
}

// ---------------------------------------------------------------------------
// Trace records

const std::vector<std::string>& TraceRecord::columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"t",     "u",     "v",     "w",  "p",  "q",  "r",
                               "phi",   "theta", "psi",   "pn", "pe", "h"};
    const char* axes[] = {"roll", "pitch", "yaw"};
    for (const char* group : {"x1_hat", "x2_hat", "d_hat", "d_injected", "d_lumped", "e",
                              "sigma", "s", "s_dot", "eta", "xi1", "xi2", "torque"}) {
      for (const char* axis : axes) c.push_back(std::string(group) + "_" + axis);
    }
    c.push_back("thrust");
    for (int i = 1; i <= 4; ++i) c.push_back("omega" + std::to_string(i));
    c.push_back("delta");
    c.push_back("delta_dot");
    c.push_back("aileron");
    c.push_back("elevator");
    c.push_back("rudder");
    c.push_back("saturated");
    c.push_back("forward_mode");
    return c;
  }();
  return cols;
}

std::vector<double> TraceRecord::to_row() const {
  std::vector<double> row;
  row.reserve(columns().size());
  row.push_back(t);
  const StateVector x = state.to_vector();
  for (int i = 0; i < 12; ++i) row.push_back(x(i));
  for (const Vec3* v : {&x1_hat, &x2_hat, &d_hat, &d_injected, &d_lumped, &error, &sigma, &s,
                        &s_dot, &eta, &xi1, &xi2, &torque}) {
    for (int i = 0; i < 3; ++i) row.push_back((*v)(i));
  }
  row.push_back(thrust);
  for (double w : omega) row.push_back(w);
  row.push_back(delta);
  row.push_back(delta_dot);
  for (int i = 0; i < 3; ++i) row.push_back(deflection(i));
  row.push_back(saturated ? 1.0 : 0.0);
  row.push_back(forward_mode ? 1.0 : 0.0);
  return row;
}

TraceRecord TraceRecord::from_row(const std::vector<double>& row) {
  if (row.size() != columns().size()) {
    throw ConfigError("trace row has " + std::to_string(row.size()) + " fields, expected " +
                      std::to_string(columns().size()));
  }
  TraceRecord rec;
  std::size_t k = 0;
  rec.t = row[k++];
  StateVector x;
  for (int i = 0; i < 12; ++i) x(i) = row[k++];
  rec.state = BodyState::from_vector(x);
  for (Vec3* v : {&rec.x1_hat, &rec.x2_hat, &rec.d_hat, &rec.d_injected, &rec.d_lumped,
                  &rec.error, &rec.sigma, &rec.s, &rec.s_dot, &rec.eta, &rec.xi1, &rec.xi2,
                  &rec.torque}) {
    for (int i = 0; i < 3; ++i) (*v)(i) = row[k++];
  }
  rec.thrust = row[k++];
  for (double& w : rec.omega) w = row[k++];
  rec.delta = row[k++];
  rec.delta_dot = row[k++];
  for (int i = 0; i < 3; ++i) rec.deflection(i) = row[k++];
  rec.saturated = row[k++] != 0.0;
  rec.forward_mode = row[k++] != 0.0;
  return rec;
}

bool TraceRecord::operator==(const TraceRecord& other) const { return to_row() == other.to_row(); }

// ---------------------------------------------------------------------------
// Simulator

Simulator::Simulator(ScenarioConfig config) : config_(std::move(config)), rng_(config_.seed) {
  config_.validate();
  ControllerConfig ctrl = config_.active_controller();
  ctrl.kind = config_.controller;
  controller_ = make_controller(ctrl, config_.vehicle);
  plant_ = config_.initial;

  if ((config_.angle_noise_std.array() > 0.0).any()) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < 3; ++i) noise_(i) = config_.angle_noise_std(i) * normal(rng_);
  }

  const Vec3 angle = plant_.euler() + noise_;
  for (int i = 0; i < 3; ++i) {
    ObserverChannel& ch = observer_[i];
    ch.gains = config_.observer[i];
    ch.switching = config_.observer_switching;
    ch.sat_delta = config_.observer_sat_delta;
    ch.x1_hat = angle(i);
    ch.x2_hat = 0.0;
    ch.d_hat = 0.0;
  }

  trace_.controller = to_string(config_.controller);
  trace_.step = config_.step;
  trace_.records.reserve(config_.step_count() + 1);

  try {
    controller_->initialize(sense(plant_, noise_));
    pending_ = actuate(false);
  } catch (const SingularMixerError& e) {
    throw SingularMixerError(at_time(time_, e.what()));
  } catch (const SingularityError& e) {
    throw SingularityError(at_time(time_, e.what()));
  } catch (const NumericalError& e) {
    throw NumericalError(at_time(time_, e.what()));
  }
  record(pending_);
}

ControlInput Simulator::sense(const BodyState& plant, const Vec3& angle_noise) const {
  ControlInput in;
  in.angle = plant.euler() + angle_noise;
  in.euler_rate = euler_rates(plant);
  in.body_rate = plant.rates();
  for (int i = 0; i < 3; ++i) {
    in.rate_hat(i) = observer_[i].x2_hat;
    in.d_hat(i) = observer_[i].d_hat;
  }
  in.reference = config_.reference;
  return in;
}

TiltState Simulator::scheduled_tilt(double t) const {
  if (t < config_.reconversion.t0) return tilt_at(config_.conversion, t);
  return tilt_at(config_.reconversion, t);
}

Simulator::Actuation Simulator::actuate(bool advance_observer) {
  const VehicleParams& vp = config_.vehicle;
  if (advance_observer) {
    // sample k: the accelerations applied over the previous period were held
    const Vec3 measured = plant_.euler() + noise_;
    const Vec3 gyro = gyroscopic_coupling(pending_.input.body_rate, vp);
    const Vec3 accel = pending_.achieved.cwiseQuotient(vp.inertia());
    for (int i = 0; i < 3; ++i) {
      observer_[i] = observer_update(observer_[i], measured(i), gyro(i), accel(i), config_.step);
    }
  }
  Actuation act;
  act.input = sense(plant_, noise_);
  act.torque = controller_->torque(act.input);
  act.tilt = scheduled_tilt(time_);

  const double delta = act.tilt.delta;
  act.rotors.delta = delta;
  act.forward_mode = delta >= kHalfPi - config_.forward_tilt_margin;

  if (!act.forward_mode) {
    act.thrust = config_.thrust_policy == ThrustPolicy::kTiltShare ? -vp.m * vp.g * std::cos(delta)
                                                                   : -vp.m * vp.g;
    const VirtualCommand cmd{act.thrust, act.torque(0), act.torque(1), act.torque(2)};
    const AllocationResult alloc = allocate(cmd, delta, vp, config_.omega_max);
    act.rotors.omega = alloc.omega;
    act.saturated = alloc.saturated;
    act.achieved = alloc.achieved.head<3>();
  } else {
    const double forward = config_.forward_thrust >= 0.0 ? config_.forward_thrust
                                                         : 0.5 * vp.m * vp.g;
    const double omega_front = std::sqrt(0.5 * forward / vp.kt);
    act.rotors.omega = {omega_front, 0.0, omega_front, 0.0};
    const VirtualCommand cmd{0.0, act.torque(0), act.torque(1), act.torque(2)};
    const SurfaceDeflection defl = forward_mode_stub(cmd, config_.surface_authority);
    act.deflection = defl.as_vector();
    act.surface_moment = act.deflection.cwiseProduct(config_.surface_authority);
    act.achieved = act.surface_moment;
    act.saturated = ((act.deflection.array().abs() >= 1.0)).any();
  }
  return act;
}

Simulator::Augmented Simulator::pack() const {
  Augmented x;
  x.head<12>() = plant_.to_vector();
  const ControllerAux& aux = controller_->aux();
  for (int i = 0; i < 3; ++i) {
    x(12 + 3 * i) = aux[i].term_integral;
    x(13 + 3 * i) = aux[i].eta;
    x(14 + 3 * i) = aux[i].sw_integral;
  }
  return x;
}

void Simulator::unpack(const Augmented& x) {
  plant_ = BodyState::from_vector(x.head<12>());
  ControllerAux aux{};
  for (int i = 0; i < 3; ++i) {
    aux[i].term_integral = x(12 + 3 * i);
    aux[i].eta = x(13 + 3 * i);
    aux[i].sw_integral = x(14 + 3 * i);
  }
  controller_->set_aux(aux);
}

Simulator::Augmented Simulator::derivative(double t, const Augmented& x,
                                           const Actuation& act) const {
  const VehicleParams& vp = config_.vehicle;
  const BodyState plant = BodyState::from_vector(x.head<12>());
  ControllerAux aux{};
  for (int i = 0; i < 3; ++i) {
    aux[i].term_integral = x(12 + 3 * i);
    aux[i].eta = x(13 + 3 * i);
    aux[i].sw_integral = x(14 + 3 * i);
  }

  const Vec3 d = disturbance_at(config_.disturbance, t);
  Augmented dx;
  dx.head<12>() =
      state_derivative(plant, act.rotors, vp, config_.aero, d, act.surface_moment).to_vector();

  const ControlInput in = sense(plant, noise_);
  const ControllerAux da = controller_->aux_derivative(in, aux, act.torque);
  for (int i = 0; i < 3; ++i) {
    dx(12 + 3 * i) = da[i].term_integral;
    dx(13 + 3 * i) = da[i].eta;
    dx(14 + 3 * i) = da[i].sw_integral;
  }
  return dx;
}

void Simulator::record(const Actuation& act) {
  const VehicleParams& vp = config_.vehicle;
  TraceRecord rec;
  rec.t = time_;
  rec.state = plant_;
  for (int i = 0; i < 3; ++i) {
    rec.x1_hat(i) = observer_[i].x1_hat;
    rec.x2_hat(i) = observer_[i].x2_hat;
    rec.d_hat(i) = observer_[i].d_hat;
  }
  rec.d_injected = disturbance_at(config_.disturbance, time_);
  const Vec3 applied =
      total_moment(plant_, act.rotors, vp, config_.aero) + act.surface_moment;
  rec.d_lumped = (applied - act.achieved).cwiseQuotient(vp.inertia()) + rec.d_injected;
  rec.error = act.input.angle - config_.reference.angle;
  const auto& ch = controller_->channels();
  for (int i = 0; i < 3; ++i) {
    rec.sigma(i) = ch[i].sigma;
    rec.s(i) = ch[i].s;
    rec.s_dot(i) = ch[i].s_dot;
    rec.eta(i) = controller_->aux()[i].eta;
    rec.xi1(i) = ch[i].xi1_hat;
    rec.xi2(i) = ch[i].xi2_hat;
  }
  rec.torque = act.torque;
  rec.thrust = act.thrust;
  rec.omega = act.rotors.omega;
  rec.delta = act.tilt.delta;
  rec.delta_dot = act.tilt.delta_dot;
  rec.deflection = act.deflection;
  rec.saturated = act.saturated;
  rec.forward_mode = act.forward_mode;
  trace_.records.push_back(rec);
}

void Simulator::step_once() {
  const double h = config_.step;
  const double t = time_;
  try {
    const Actuation act = pending_;
    const Augmented x0 = pack();
    const Augmented k1 = derivative(t, x0, act);
    const Augmented k2 = derivative(t + 0.5 * h, x0 + 0.5 * h * k1, act);
    const Augmented k3 = derivative(t + 0.5 * h, x0 + 0.5 * h * k2, act);
    const Augmented k4 = derivative(t + h, x0 + h * k3, act);
    const Augmented x1 = x0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x1.allFinite()) throw NumericalError("state became non-finite");

    controller_->end_step(act.input, act.torque, h);
    unpack(x1);
    ++steps_;
    time_ = static_cast<double>(steps_) * h;

    if (plant_.euler().cwiseAbs().maxCoeff() > kDivergenceAngle) {
      throw NumericalError("attitude diverged");
    }
    if ((config_.angle_noise_std.array() > 0.0).any()) {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (int i = 0; i < 3; ++i) noise_(i) = config_.angle_noise_std(i) * normal(rng_);
    }
    pending_ = actuate(true);
  } catch (const SingularMixerError& e) {
    throw SingularMixerError(at_time(time_, e.what()));
  } catch (const SingularityError& e) {
    throw SingularityError(at_time(time_, e.what()));
  } catch (const NumericalError& e) {
    throw NumericalError(at_time(time_, e.what()));
  }
  record(pending_);
}

const SimTrace& Simulator::run() {
  const std::size_t n = config_.step_count();
  while (steps_ < n) step_once();
  return trace_;
}

SimTrace run(const ScenarioConfig& config) {
  Simulator sim(config);
  sim.run();
  return sim.trace();
}

}  // namespace tiltrotor
