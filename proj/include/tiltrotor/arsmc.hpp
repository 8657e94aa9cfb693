#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>

#include "tiltrotor/rigid_body.hpp"

namespace tiltrotor {

/// Recursive terminal surface gains for one axis:
///   sigma = e_dot + k_lin*e + k_term*Int(sig^alpha(e)),  s = sigma + lambda*eta,
///   eta_dot = sig^beta(sigma).
struct SurfaceGains {
  double k_lin = 8.0;
  double k_term = 4.0;
  double alpha = 1.5;
  double lambda = 5.0;
  double beta = 0.6;

  void validate() const;
};

/// Gain adaptation of the switching law.
struct AdaptationConfig {
  double rho = 1.0;
  double epsilon = 1e-4;    // adaptation is frozen while |e| <= epsilon (rad)
  double sat_delta = 0.01;  // boundary layer of the smoothed sign
  double xi1_init = 1.0;
  double xi2_init = 1.0;
  // +1 grows the gains with sliding activity; -1 shrinks them.
  int adaptation_sign = 1;

  void validate() const;
};

/// Per-axis state of the recursive controller.
struct ControllerChannel {
  double term_integral = 0.0;  // Int(sig^alpha(e))
  double eta = 0.0;
  double sw_integral = 0.0;  // Int(sig^{1/2}(s_dot)) with sat-smoothed sign
  double xi1_hat = 1.0;
  double xi2_hat = 1.0;

  // last evaluated values, for tracing
  double sigma = 0.0;
  double s = 0.0;
  double s_dot = 0.0;
};

/// Desired Euler angles and derivatives (constant by default).
struct AttitudeReference {
  Vec3 angle = Vec3::Zero();
  Vec3 rate = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
  Vec3 jerk = Vec3::Zero();
};

struct SurfaceValue {
  double sigma = 0.0;
  double s = 0.0;
};

/// eta(0) = -sigma(0)/lambda, which puts s(0) exactly on the surface.
double init_eta(double sigma0, double lambda);

/// Fast terminal function sigma and recursive surface s.
SurfaceValue surface_eval(double e, double e_dot, double term_integral, double eta,
                          const SurfaceGains& gains);

/// Model-based ds/dt for a given error acceleration.
double surface_rate(double e, double e_dot, double e_ddot, double sigma,
                    const SurfaceGains& gains);

/// Model-cancelling torque that makes ds/dt = 0 when the disturbance
/// estimate is exact:
///   u0 = I*[ref_accel - k_lin*e_dot - k_term*sig^alpha(e) - lambda*sig^beta(sigma) - d_hat]
///        - I*gyro_accel
double equivalent_control(double e, double e_dot, double sigma, double ref_accel,
                          double gyro_accel, double d_hat, double inertia,
                          const SurfaceGains& gains);

/// u1 = -I*[xi1*s + xi2*Int(sig^{1/2}(s_dot))]
double switching_control(const ControllerChannel& channel, double s, double inertia);

/// Integrand of the switching integral: |x|^{1/2} * sat(x).
double switching_integrand(double s_dot, double sat_delta);

/// One explicit adaptation step of (xi1, xi2), gated by |e| > epsilon.
std::pair<double, double> adapt_gains(const ControllerChannel& channel, double s_dot, double e,
                                      const AdaptationConfig& config, double step);

/// Everything a controller may read at one instant.
struct ControlInput {
  Vec3 angle = Vec3::Zero();       // measured Euler angles
  Vec3 euler_rate = Vec3::Zero();  // sensed Euler-angle rates
  Vec3 body_rate = Vec3::Zero();   // gyro (p, q, r)
  Vec3 rate_hat = Vec3::Zero();    // observer rate estimates
  Vec3 d_hat = Vec3::Zero();       // observer disturbance estimates
  AttitudeReference reference;
};

/// Integrated auxiliary controller states of one axis.
struct AxisAux {
  double term_integral = 0.0;
  double eta = 0.0;
  double sw_integral = 0.0;
};
using ControllerAux = std::array<AxisAux, 3>;

enum class ControllerKind { kSac, kFtsmc, kRsmc };

std::string to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(const std::string& name);

/// Gains of the constant-gain fast terminal baseline.
struct FtsmcGains {
  double k_lin = 2.0;
  double k_term = 1.0;
  double alpha = 1.5;
  double k_s = 3.0;   // linear reaching gain
  double k_w = 0.5;   // switching reaching gain
  double sat_delta = 0.01;

  void validate() const;
};

struct ControllerConfig {
  ControllerKind kind = ControllerKind::kSac;
  std::array<SurfaceGains, 3> surface{};
  std::array<AdaptationConfig, 3> adaptation{};
  std::array<FtsmcGains, 3> ftsmc{};
  std::optional<Vec3> torque_limit;  // symmetric clamp, off by default

  void validate() const;
};

/// Attitude controller producing virtual torques (u1, u2, u3).
///
/// The simulation holds the torque constant over a step; the auxiliary
/// integrals are advanced by the same integrator as the plant through
/// `aux()`, `set_aux()` and `aux_derivative()`.
class AttitudeController {
 public:
  virtual ~AttitudeController() = default;

  /// Place the controller on its surfaces at t = 0 (resets the auxiliary states).
  virtual void initialize(const ControlInput& in) = 0;

  virtual Vec3 torque(const ControlInput& in) = 0;

  virtual ControllerAux aux_derivative(const ControlInput& in, const ControllerAux& aux,
                                       const Vec3& held_torque) const = 0;

  /// End-of-step hook (gain adaptation).
  virtual void end_step(const ControlInput& in, const Vec3& held_torque, double step) = 0;

  virtual ControllerKind kind() const = 0;

  const ControllerAux& aux() const { return aux_; }
  void set_aux(const ControllerAux& aux) { aux_ = aux; }
  const std::array<ControllerChannel, 3>& channels() const { return channels_; }

 protected:
  ControllerAux aux_{};
  std::array<ControllerChannel, 3> channels_{};
};

/// Recursive sliding-mode law. With `adaptive` and `use_observer` set this is
/// the observer-based adaptive controller; with both cleared it is the
/// fixed-gain recursive baseline.
class RecursiveSlidingController : public AttitudeController {
 public:
  RecursiveSlidingController(const ControllerConfig& config, const VehicleParams& params,
                             bool adaptive, bool use_observer);

  void initialize(const ControlInput& in) override;
  Vec3 torque(const ControlInput& in) override;
  ControllerAux aux_derivative(const ControlInput& in, const ControllerAux& aux,
                               const Vec3& held_torque) const override;
  void end_step(const ControlInput& in, const Vec3& held_torque, double step) override;
  ControllerKind kind() const override { return kind_; }

 private:
  struct AxisSignals {
    double e, e_dot, ref_accel, gyro_accel, d_hat;
  };
  AxisSignals signals(const ControlInput& in, int axis) const;
  double axis_s_dot(const AxisSignals& sig, const AxisAux& aux, double held_torque,
                    int axis) const;

  ControllerConfig config_;
  VehicleParams params_;
  bool adaptive_;
  bool use_observer_;
  ControllerKind kind_;
};

/// Fast terminal sliding-mode baseline with a constant-gain reaching law:
///   u = u_eq - I*(k_s*sigma + k_w*sat(sigma)).
class FastTerminalController : public AttitudeController {
 public:
  FastTerminalController(const ControllerConfig& config, const VehicleParams& params);

  void initialize(const ControlInput& in) override;
  Vec3 torque(const ControlInput& in) override;
  ControllerAux aux_derivative(const ControlInput& in, const ControllerAux& aux,
                               const Vec3& held_torque) const override;
  void end_step(const ControlInput&, const Vec3&, double) override {}
  ControllerKind kind() const override { return ControllerKind::kFtsmc; }

 private:
  ControllerConfig config_;
  VehicleParams params_;
};

std::unique_ptr<AttitudeController> make_controller(const ControllerConfig& config,
                                                    const VehicleParams& params);

}  // namespace tiltrotor
