#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tiltrotor/simkernel.hpp"

namespace tiltrotor {

/// A closed time interval [t_begin, t_end] selecting trace samples.
struct TimeWindow {
  std::string name;
  double t_begin = 0.0;
  double t_end = 0.0;
};

/// Conversion, reconversion and full-run windows of one scenario.
std::vector<TimeWindow> report_windows(const ScenarioConfig& config);

/// Maximum absolute and root-mean-square error of one channel over one window.
struct ChannelMetrics {
  double max_e = 0.0;
  double rms_e = 0.0;
  std::size_t samples = 0;
};

/// Per channel (roll, pitch, yaw) metrics of one trace over one window.
/// Values are in the unit of the input samples.
struct WindowMetrics {
  TimeWindow window;
  std::array<ChannelMetrics, 3> channel{};
};

/// Streaming single-pass max |e| and RMS over the samples with
/// t_begin <= t <= t_end. Throws ConfigError when no sample falls inside.
WindowMetrics compute_metrics(const SimTrace& trace, const TimeWindow& window,
                              double scale = 1.0);

/// MAX_e / RMS_e of one raw sample sequence.
ChannelMetrics compute_metrics(const std::vector<double>& samples);

/// 1 - sac / baseline.
double improvement_ratio(double sac, double baseline);

inline constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

/// Metrics of the three controllers on a shared scenario, in degrees.
struct MetricsReport {
  std::string scenario;
  std::vector<TimeWindow> windows;
  // controller name -> one WindowMetrics per window
  std::map<std::string, std::vector<WindowMetrics>> by_controller;

  const WindowMetrics& at(const std::string& controller, const std::string& window) const;
};

MetricsReport build_report(const std::string& scenario, const std::vector<TimeWindow>& windows,
                           const std::vector<SimTrace>& traces);

/// Text table per window: rows Roll, Pitch, Yaw x {MAX_e, RMS_e}, columns
/// FTSMC, RSMC, SAC, I1 (vs FTSMC), I2 (vs RSMC).
std::string emit_tables(const MetricsReport& report);

/// Shortest round-tripping decimal form (at most 17 significant digits).
std::string format_double(double value);
double parse_double(const std::string& text);

/// CSV with a header row of TraceRecord::columns().
void emit_trace(const SimTrace& trace, const std::filesystem::path& path);
SimTrace parse_trace(const std::filesystem::path& path);
void write_trace_csv(const SimTrace& trace, std::ostream& out);
SimTrace read_trace_csv(std::istream& in);

/// Columnar time-value file: "t" followed by the requested trace columns.
/// Throws ConfigError on an unknown signal name.
void emit_plotdata(const SimTrace& trace, const std::vector<std::string>& signals,
                   const std::filesystem::path& path);

}  // namespace tiltrotor
