#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "tiltrotor/errors.hpp"
#include "tiltrotor/report.hpp"
#include "tiltrotor/simkernel.hpp"

using namespace tiltrotor;

namespace {

const SimTrace& nominal_sac() {
  static const SimTrace trace = run(default_scenario());
  return trace;
}

const SimTrace& disturbed_sac() {
  static const SimTrace trace = [] {
    auto cfg = default_scenario();
    cfg.disturbance = DisturbanceProfile::reference_pulse();
    return run(cfg);
  }();
  return trace;
}

}  // namespace

TEST_CASE("reference disturbance pulse") {
  const auto d = DisturbanceProfile::reference_pulse();
  CHECK(disturbance_at(d, 9.5).x() == doctest::Approx(5.0));
  CHECK(disturbance_at(d, 9.5).z() == doctest::Approx(5.0));
  CHECK(disturbance_at(d, 8.0).norm() == 0.0);
  CHECK(disturbance_at(d, 12.0).norm() == 0.0);
  CHECK(std::abs(disturbance_at(d, 10.0).y()) < 1e-14);
  CHECK(disturbance_at(DisturbanceProfile{}, 9.5).norm() == 0.0);
}

TEST_CASE("disturbance terms add") {
  DisturbanceProfile d = DisturbanceProfile::windowed_sine(2.0, 1.0, 0.0, 10.0);
  DisturbanceTerm c;
  c.amplitude = Vec3(0.5, -0.5, 1.0);
  d.terms.push_back(c);
  const Vec3 v = disturbance_at(d, 1.0);
  CHECK(v.x() == doctest::Approx(2.0 * std::sin(1.0) + 0.5));
  CHECK(v.y() == doctest::Approx(2.0 * std::sin(1.0) - 0.5));
}

TEST_CASE("zero-duration run keeps only the initial record") {
  auto cfg = default_scenario();
  cfg.duration = 0.0;
  const auto trace = run(cfg);
  REQUIRE(trace.records.size() == 1);
  CHECK(trace.records[0].t == 0.0);
  CHECK(trace.records[0].state.phi == cfg.initial.phi);
}

TEST_CASE("trace grid is uniform with one record per step") {
  const auto& trace = nominal_sac();
  CHECK(trace.records.size() == 24001);
  for (std::size_t k = 0; k < trace.records.size(); k += 997) {
    CHECK(trace.records[k].t == static_cast<double>(k) * 1e-3);
  }
}

TEST_CASE("equilibrium is a fixed point") {
  auto cfg = default_scenario();
  cfg.initial = BodyState{};
  cfg.duration = 0.2;
  const auto trace = run(cfg);
  for (std::size_t k = 1; k < trace.records.size(); ++k) {
    const auto a = trace.records[k - 1].state.to_vector();
    const auto b = trace.records[k].state.to_vector();
    CHECK((b - a).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("runs are deterministic") {
  auto cfg = default_scenario();
  cfg.duration = 2.0;
  const auto a = run(cfg), b = run(cfg);
  CHECK(a == b);
  std::ostringstream sa, sb;
  write_trace_csv(a, sa);
  write_trace_csv(b, sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("nominal SAC run settles and keeps the conversion transient small") {
  const auto& trace = nominal_sac();
  const auto cfg = default_scenario();
  for (const auto& rec : trace.records) {
    if (rec.t >= 1.0 && rec.t < cfg.windows.conversion[0]) {
      CHECK(rec.error.cwiseAbs().maxCoeff() < 5e-4);
    }
  }
  CHECK(trace.records.back().error.cwiseAbs().maxCoeff() < 5e-4);
  const auto conv = compute_metrics(trace, report_windows(cfg)[0], kRadToDeg);
  CHECK(conv.channel[1].max_e <= 0.6);
}

TEST_CASE("closed-loop disturbance estimate follows the lumped disturbance") {
  // Pitch also carries the wing's pitching moment during conversion, so the
  // injected pulse alone is compared on roll and yaw only.
  const auto& trace = disturbed_sac();
  Vec3 peak = Vec3::Zero();
  double worst_lumped = 0.0, worst_injected = 0.0;
  for (const auto& rec : trace.records) {
    if (rec.t < 9.0 || rec.t > 11.0) continue;
    peak = peak.cwiseMax(rec.d_hat);
    if (rec.t < 9.5) continue;
    worst_lumped = std::max(worst_lumped, (rec.d_hat - rec.d_lumped).cwiseAbs().maxCoeff());
    for (int i : {0, 2}) {
      worst_injected = std::max(worst_injected, std::abs(rec.d_hat(i) - rec.d_injected(i)));
    }
  }
  CHECK(worst_lumped < 0.3);
  CHECK(worst_injected < 0.3);
  CHECK(std::abs(peak(0) - 5.0) <= 0.5);
  CHECK(std::abs(peak(2) - 5.0) <= 0.5);
}

TEST_CASE("observer tracks the measured attitude in the loop") {
  const auto& trace = nominal_sac();
  for (const auto& rec : trace.records) {
    if (rec.t < 0.5) continue;
    CHECK((rec.state.euler() - rec.x1_hat).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("all controllers run the full timeline") {
  for (auto kind : {ControllerKind::kFtsmc, ControllerKind::kRsmc}) {
    auto cfg = default_scenario();
    cfg.controller = kind;
    const auto trace = run(cfg);
    CHECK(trace.controller == to_string(kind));
    CHECK(trace.records.back().t == doctest::Approx(24.0));
    for (const auto& rec : trace.records) {
      if (!rec.state.finite()) FAIL("non-finite state");
    }
  }
}

TEST_CASE("plant RK4 converges at fourth order") {
  VehicleParams params;
  AeroCoefficients aero;
  RotorSet rotors;
  BodyState s0;
  s0.p = 1.0;
  s0.q = -2.0;
  s0.r = 0.7;
  s0.phi = 0.2;
  auto integrate = [&](double h) {
    BodyState s = s0;
    const int n = static_cast<int>(std::lround(1.0 / h));
    for (int k = 0; k < n; ++k) s = plant_rk4_step(s, rotors, params, aero, Vec3::Zero(), h);
    return s.to_vector();
  };
  const auto a = integrate(1e-2), b = integrate(5e-3), c = integrate(2.5e-3);
  const double ratio = (a - b).norm() / (b - c).norm();
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("numerical failures carry the time") {
  auto cfg = default_scenario();
  cfg.duration = 1.0;
  cfg.sac.torque_limit = Vec3(0.01, 0.01, 0.01);
  DisturbanceTerm push;
  push.amplitude = Vec3(0.0, 1000.0, 0.0);
  cfg.disturbance.terms.push_back(push);
  try {
    run(cfg);
    FAIL("expected a numerical failure");
  } catch (const SingularityError& e) {
    CHECK(std::string(e.what()).find("t = ") != std::string::npos);
  }
}

TEST_CASE("scenario validation") {
  auto cfg = default_scenario();
  CHECK_NOTHROW(cfg.validate());
  cfg.step = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = default_scenario();
  cfg.windows.conversion = {13.0, 3.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = default_scenario();
  cfg.initial.theta = std::numbers::pi / 2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("trace rows round trip through the column list") {
  const auto& rec = disturbed_sac().records[9700];
  const auto row = rec.to_row();
  CHECK(row.size() == TraceRecord::columns().size());
  CHECK(TraceRecord::from_row(row) == rec);
}
