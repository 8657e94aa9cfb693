#include "tiltrotor/arsmc.hpp"

#include <algorithm>
#include <cmath>

#include "tiltrotor/errors.hpp"
#include "tiltrotor/sliding.hpp"

namespace tiltrotor {

void SurfaceGains::validate() const {
  if (!(k_lin > 0.0 && k_term > 0.0 && lambda > 0.0)) {
    throw ConfigError("surface gains k_lin, k_term, lambda must be > 0");
  }
  if (!(alpha > 1.0)) throw ConfigError("surface exponent alpha must be > 1");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("recursion exponent beta must be in (0, 1)");
}

void AdaptationConfig::validate() const {
  if (!(rho > 0.0)) throw ConfigError("adaptation rate rho must be > 0");
  if (!(epsilon >= 0.0)) throw ConfigError("adaptation gate epsilon must be >= 0");
  if (!(sat_delta > 0.0)) throw ConfigError("sat boundary must be > 0");
  if (adaptation_sign != 1 && adaptation_sign != -1) {
    throw ConfigError("adaptation_sign must be +1 or -1");
  }
}

void FtsmcGains::validate() const {
  if (!(k_lin > 0.0 && k_term > 0.0 && k_s >= 0.0 && k_w >= 0.0 && sat_delta > 0.0)) {
    throw ConfigError("FTSMC gains must be positive");
  }
  if (!(alpha > 1.0)) throw ConfigError("FTSMC exponent alpha must be > 1");
}

void ControllerConfig::validate() const {
  for (const auto& g : surface) g.validate();
  for (const auto& a : adaptation) a.validate();
  for (const auto& f : ftsmc) f.validate();
  if (torque_limit && !((torque_limit->array() > 0.0).all())) {
    throw ConfigError("torque limits must be > 0");
  }
}

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kSac:
      return "sac";
    case ControllerKind::kFtsmc:
      return "ftsmc";
    case ControllerKind::kRsmc:
      return "rsmc";
  }
  return "unknown";
}

ControllerKind controller_kind_from_string(const std::string& name) {
  if (name == "sac") return ControllerKind::kSac;
  if (name == "ftsmc") return ControllerKind::kFtsmc;
  if (name == "rsmc") return ControllerKind::kRsmc;
  throw ConfigError("unknown controller '" + name + "' (expected sac, ftsmc or rsmc)");
}

double init_eta(double sigma0, double lambda) { return -sigma0 / lambda; }

SurfaceValue surface_eval(double e, double e_dot, double term_integral, double eta,
                          const SurfaceGains& gains) {
  SurfaceValue out;
  out.sigma = e_dot + gains.k_lin * e + gains.k_term * term_integral;
  out.s = out.sigma + gains.lambda * eta;
  return out;
}

double surface_rate(double e, double e_dot, double e_ddot, double sigma,
                    const SurfaceGains& gains) {
  const double sigma_dot = e_ddot + gains.k_lin * e_dot + gains.k_term * sig(e, gains.alpha);
  return sigma_dot + gains.lambda * sig(sigma, gains.beta);
}

double equivalent_control(double e, double e_dot, double sigma, double ref_accel,
                          double gyro_accel, double d_hat, double inertia,
                          const SurfaceGains& gains) {
  return inertia * (ref_accel - gains.k_lin * e_dot - gains.k_term * sig(e, gains.alpha) -
                    gains.lambda * sig(sigma, gains.beta) - d_hat) -
         inertia * gyro_accel;
}

double switching_control(const ControllerChannel& channel, double s, double inertia) {
  return -inertia * (channel.xi1_hat * s + channel.xi2_hat * channel.sw_integral);
}

double switching_integrand(double s_dot, double sat_delta) {
  return std::sqrt(std::abs(s_dot)) * sat(s_dot, sat_delta);
}

std::pair<double, double> adapt_gains(const ControllerChannel& channel, double s_dot, double e,
                                      const AdaptationConfig& config, double step) {
  if (std::abs(e) <= config.epsilon) return {channel.xi1_hat, channel.xi2_hat};
  const double sign_cfg = static_cast<double>(config.adaptation_sign);
  const double xi1 = channel.xi1_hat + sign_cfg * config.rho * s_dot * s_dot * step;
  const double xi2 =
      channel.xi2_hat + sign_cfg * config.rho * std::abs(sig(s_dot, 0.5)) * step;
  return {xi1, xi2};
}

namespace {

Vec3 clamp_torque(const Vec3& u, const std::optional<Vec3>& limit) {
  if (!limit) return u;
  return u.cwiseMax(-*limit).cwiseMin(*limit);
}

}  // namespace

// ---------------------------------------------------------------------------
// Recursive sliding-mode controller (adaptive + observer, or fixed baseline)

RecursiveSlidingController::RecursiveSlidingController(const ControllerConfig& config,
                                                       const VehicleParams& params,
                                                       bool adaptive, bool use_observer)
    : config_(config),
      params_(params),
      adaptive_(adaptive),
      use_observer_(use_observer),
      kind_(adaptive && use_observer ? ControllerKind::kSac : ControllerKind::kRsmc) {
  config_.validate();
  for (int i = 0; i < 3; ++i) {
    channels_[i].xi1_hat = config_.adaptation[i].xi1_init;
    channels_[i].xi2_hat = config_.adaptation[i].xi2_init;
  }
}

RecursiveSlidingController::AxisSignals RecursiveSlidingController::signals(
    const ControlInput& in, int axis) const {
  const Vec3 gyro = gyroscopic_coupling(in.body_rate, params_);
  const double rate = use_observer_ ? in.rate_hat(axis) : in.euler_rate(axis);
  return {in.angle(axis) - in.reference.angle(axis), rate - in.reference.rate(axis),
          in.reference.accel(axis), gyro(axis), use_observer_ ? in.d_hat(axis) : 0.0};
}

double RecursiveSlidingController::axis_s_dot(const AxisSignals& sig, const AxisAux& aux,
                                               double held_torque, int axis) const {
  const SurfaceGains& g = config_.surface[axis];
  const double sigma = surface_eval(sig.e, sig.e_dot, aux.term_integral, aux.eta, g).sigma;
  const double e_ddot =
      sig.gyro_accel + held_torque / params_.inertia()(axis) + sig.d_hat - sig.ref_accel;
  return surface_rate(sig.e, sig.e_dot, e_ddot, sigma, g);
}

void RecursiveSlidingController::initialize(const ControlInput& in) {
  for (int i = 0; i < 3; ++i) {
    const AxisSignals sig = signals(in, i);
    const SurfaceGains& g = config_.surface[i];
    aux_[i].term_integral = 0.0;
    aux_[i].sw_integral = 0.0;
    const double sigma0 = surface_eval(sig.e, sig.e_dot, 0.0, 0.0, g).sigma;
    aux_[i].eta = init_eta(sigma0, g.lambda);
    const SurfaceValue sv = surface_eval(sig.e, sig.e_dot, 0.0, aux_[i].eta, g);
    channels_[i].sigma = sv.sigma;
    channels_[i].s = sv.s;
    channels_[i].term_integral = 0.0;
    channels_[i].eta = aux_[i].eta;
    channels_[i].sw_integral = 0.0;
  }
}

Vec3 RecursiveSlidingController::torque(const ControlInput& in) {
  Vec3 u;
  for (int i = 0; i < 3; ++i) {
    const AxisSignals sig = signals(in, i);
    const SurfaceGains& g = config_.surface[i];
    const double inertia = params_.inertia()(i);
    ControllerChannel& ch = channels_[i];
    ch.term_integral = aux_[i].term_integral;
    ch.eta = aux_[i].eta;
    ch.sw_integral = aux_[i].sw_integral;

    const SurfaceValue sv = surface_eval(sig.e, sig.e_dot, ch.term_integral, ch.eta, g);
    const double u0 = equivalent_control(sig.e, sig.e_dot, sv.sigma, sig.ref_accel,
                                         sig.gyro_accel, sig.d_hat, inertia, g);
    const double u1 = switching_control(ch, sv.s, inertia);
    u(i) = u0 + u1;
    ch.sigma = sv.sigma;
    ch.s = sv.s;
  }
  u = clamp_torque(u, config_.torque_limit);
  for (int i = 0; i < 3; ++i) channels_[i].s_dot = axis_s_dot(signals(in, i), aux_[i], u(i), i);
  return u;
}

ControllerAux RecursiveSlidingController::aux_derivative(const ControlInput& in,
                                                         const ControllerAux& aux,
                                                         const Vec3& held_torque) const {
  ControllerAux dx{};
  for (int i = 0; i < 3; ++i) {
    const AxisSignals sig = signals(in, i);
    const SurfaceGains& g = config_.surface[i];
    const double sigma =
        surface_eval(sig.e, sig.e_dot, aux[i].term_integral, aux[i].eta, g).sigma;
    dx[i].term_integral = tiltrotor::sig(sig.e, g.alpha);
    dx[i].eta = tiltrotor::sig(sigma, g.beta);
    dx[i].sw_integral = switching_integrand(axis_s_dot(sig, aux[i], held_torque(i), i),
                                            config_.adaptation[i].sat_delta);
  }
  return dx;
}

void RecursiveSlidingController::end_step(const ControlInput& in, const Vec3& /*held_torque*/,
                                          double step) {
  if (!adaptive_) return;
  for (int i = 0; i < 3; ++i) {
    const AxisSignals sig = signals(in, i);
    auto [xi1, xi2] = adapt_gains(channels_[i], channels_[i].s_dot, sig.e,
                                  config_.adaptation[i], step);
    channels_[i].xi1_hat = xi1;
    channels_[i].xi2_hat = xi2;
  }
}

// ---------------------------------------------------------------------------
// Fast terminal baseline

FastTerminalController::FastTerminalController(const ControllerConfig& config,
                                               const VehicleParams& params)
    : config_(config), params_(params) {
  config_.validate();
}

void FastTerminalController::initialize(const ControlInput& in) {
  for (int i = 0; i < 3; ++i) {
    aux_[i] = AxisAux{};
    const double e = in.angle(i) - in.reference.angle(i);
    const double e_dot = in.euler_rate(i) - in.reference.rate(i);
    channels_[i].sigma = e_dot + config_.ftsmc[i].k_lin * e;
    channels_[i].s = channels_[i].sigma;
  }
}

Vec3 FastTerminalController::torque(const ControlInput& in) {
  const Vec3 gyro = gyroscopic_coupling(in.body_rate, params_);
  Vec3 u;
  for (int i = 0; i < 3; ++i) {
    const FtsmcGains& g = config_.ftsmc[i];
    const double inertia = params_.inertia()(i);
    const double e = in.angle(i) - in.reference.angle(i);
    const double e_dot = in.euler_rate(i) - in.reference.rate(i);
    const double sigma = e_dot + g.k_lin * e + g.k_term * aux_[i].term_integral;
    const double reaching = g.k_s * sigma + g.k_w * sat(sigma, g.sat_delta);
    u(i) = inertia * (in.reference.accel(i) - g.k_lin * e_dot - g.k_term * sig(e, g.alpha) -
                      reaching) -
           inertia * gyro(i);
    ControllerChannel& ch = channels_[i];
    ch.term_integral = aux_[i].term_integral;
    ch.sigma = sigma;
    ch.s = sigma;
    ch.s_dot = -reaching;
  }
  return clamp_torque(u, config_.torque_limit);
}

ControllerAux FastTerminalController::aux_derivative(const ControlInput& in,
                                                     const ControllerAux& /*aux*/,
                                                     const Vec3& /*held_torque*/) const {
  ControllerAux dx{};
  for (int i = 0; i < 3; ++i) {
    const double e = in.angle(i) - in.reference.angle(i);
    dx[i].term_integral = sig(e, config_.ftsmc[i].alpha);
  }
  return dx;
}

std::unique_ptr<AttitudeController> make_controller(const ControllerConfig& config,
                                                    const VehicleParams& params) {
  switch (config.kind) {
    case ControllerKind::kSac:
      return std::make_unique<RecursiveSlidingController>(config, params, true, true);
    case ControllerKind::kRsmc:
      return std::make_unique<RecursiveSlidingController>(config, params, false, false);
    case ControllerKind::kFtsmc:
      return std::make_unique<FastTerminalController>(config, params);
  }
  throw ConfigError("unknown controller kind");
}

}  // namespace tiltrotor
