#include <CLI11.hpp>

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <locale>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tiltrotor/config.hpp"
#include "tiltrotor/errors.hpp"
#include "tiltrotor/report.hpp"
#include "tiltrotor/simkernel.hpp"

namespace fs = std::filesystem;
using namespace tiltrotor;

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  std::string controller = "sac";
  std::string disturbance;
  std::optional<double> step;
};

ScenarioConfig load_config(const Options& opt) {
  ScenarioConfig cfg = opt.config_path.empty() ? default_scenario() : load_scenario(opt.config_path);
  if (opt.disturbance == "on") {
    cfg.disturbance = DisturbanceProfile::reference_pulse();
  } else if (opt.disturbance == "off") {
    cfg.disturbance = DisturbanceProfile{};
  }
  if (opt.step) cfg.step = *opt.step;
  cfg.validate();
  return cfg;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string single_table(const SimTrace& trace, const std::vector<TimeWindow>& windows) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << "controller " << trace.controller << ", error in deg\n";
  for (const auto& w : windows) {
    const auto m = compute_metrics(trace, w, kRadToDeg);
    out << w.name << " [" << w.t_begin << ", " << w.t_end << "] s\n";
    static const char* kChannels[] = {"Roll", "Pitch", "Yaw"};
    for (int i = 0; i < 3; ++i) {
      out << "  " << kChannels[i] << "  MAX_e " << m.channel[i].max_e << "  RMS_e "
          << m.channel[i].rms_e << "\n";
    }
  }
  return out.str();
}

int cmd_run(const Options& opt) {
  ScenarioConfig cfg = load_config(opt);
  cfg.controller = controller_kind_from_string(opt.controller);
  const SimTrace trace = run(cfg);
  const fs::path out(opt.out_dir);
  ensure_dir(out);
  emit_trace(trace, out / ("trace_" + trace.controller + ".csv"));
  const std::string table = single_table(trace, report_windows(cfg));
  write_text(out / ("metrics_" + trace.controller + ".txt"), table);
  std::cout << table;
  return 0;
}

int cmd_compare(const Options& opt) {
  const ScenarioConfig base = load_config(opt);
  const std::vector<ControllerKind> kinds{ControllerKind::kFtsmc, ControllerKind::kRsmc,
                                          ControllerKind::kSac};
  std::vector<SimTrace> traces(kinds.size());
  std::vector<std::exception_ptr> failures(kinds.size());
  {
    std::vector<std::jthread> workers;
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      workers.emplace_back([&, k] {
        try {
          ScenarioConfig cfg = base;
          cfg.controller = kinds[k];
          traces[k] = run(cfg);
        } catch (...) {
          failures[k] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  const fs::path out(opt.out_dir);
  ensure_dir(out);
  for (const auto& trace : traces) emit_trace(trace, out / ("trace_" + trace.controller + ".csv"));
  const auto report = build_report(base.name, report_windows(base), traces);
  const std::string tables = emit_tables(report);
  write_text(out / "tables.txt", tables);
  std::cout << tables;
  return 0;
}

int cmd_check(const Options& opt) {
  ScenarioConfig cfg = load_config(opt);
  cfg.controller = controller_kind_from_string(opt.controller);
  const SimTrace trace = run(cfg);
  int failed = 0;
  auto report = [&failed](bool ok, const std::string& what) {
    std::cout << (ok ? "PASS " : "FAIL ") << what << "\n";
    if (!ok) ++failed;
  };

  bool finite = true;
  for (const auto& rec : trace.records) {
    for (double v : rec.to_row()) finite = finite && std::isfinite(v);
  }
  report(finite, "all trace values finite");

  const auto& first = trace.records.front();
  report(first.s.cwiseAbs().maxCoeff() <= 1e-12, "s(0) = 0 on every axis");

  bool max_ge_rms = true;
  for (const auto& w : report_windows(cfg)) {
    const auto m = compute_metrics(trace, w);
    for (const auto& c : m.channel) max_ge_rms = max_ge_rms && c.max_e >= c.rms_e;
  }
  report(max_ge_rms, "MAX_e >= RMS_e in every window");

  const auto& last = trace.records.back();
  const Vec3 angles(last.state.phi, last.state.theta, last.state.psi);
  report((angles - last.x1_hat).cwiseAbs().maxCoeff() < 1e-4,
         "final |angle - x1_hat| < 1e-4 rad");

  bool bounded = true;
  for (const auto& rec : trace.records) {
    if (rec.t >= cfg.windows.conversion[0]) bounded = bounded && rec.error.cwiseAbs().maxCoeff() < 0.1;
  }
  report(bounded, "|e| < 0.1 rad after the hover segment");
  return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tiltrotor attitude control simulator"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Scenario JSON file (default: built-in scenario)");
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--disturbance", opt.disturbance, "Override the disturbance profile")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--step", opt.step, "Integration step (s)");
  };
  auto* run_cmd = app.add_subcommand("run", "Simulate one controller and write its trace");
  auto* compare_cmd = app.add_subcommand("compare", "Simulate FTSMC, RSMC and SAC and print tables");
  auto* check_cmd = app.add_subcommand("check", "Run the invariant suite on one scenario");
  for (auto* sub : {run_cmd, compare_cmd, check_cmd}) add_common(sub);
  for (auto* sub : {run_cmd, check_cmd}) {
    sub->add_option("--controller", opt.controller, "Controller")
        ->check(CLI::IsMember({"sac", "ftsmc", "rsmc"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) return cmd_run(opt);
    if (*compare_cmd) return cmd_compare(opt);
    return cmd_check(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidScheduleError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  }
}
