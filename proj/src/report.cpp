#include "tiltrotor/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

#include "tiltrotor/errors.hpp"

namespace tiltrotor {

std::vector<TimeWindow> report_windows(const ScenarioConfig& config) {
  return {{"conversion", config.windows.conversion[0], config.windows.conversion[1]},
          {"reconversion", config.windows.reconversion[0], config.windows.reconversion[1]},
          {"full", 0.0, config.duration}};
}

namespace {

struct RunningMetrics {
  double max_abs = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;

  void add(double e) {
    const double a = std::abs(e);
    if (a > max_abs) max_abs = a;
    sum_sq += e * e;
    ++n;
  }

  ChannelMetrics finish() const {
    ChannelMetrics m;
    m.samples = n;
    m.max_e = max_abs;
    m.rms_e = n > 0 ? std::sqrt(sum_sq / static_cast<double>(n)) : 0.0;
    return m;
  }
};

}  // namespace

WindowMetrics compute_metrics(const SimTrace& trace, const TimeWindow& window, double scale) {
  std::array<RunningMetrics, 3> acc{};
  for (const auto& rec : trace.records) {
    if (rec.t < window.t_begin || rec.t > window.t_end) continue;
    for (int i = 0; i < 3; ++i) acc[i].add(scale * rec.error(i));
  }
  if (acc[0].n == 0) {
    std::ostringstream msg;
    msg << "window '" << window.name << "' [" << window.t_begin << ", " << window.t_end
        << "] contains no trace samples";
    throw ConfigError(msg.str());
  }
  WindowMetrics out;
  out.window = window;
  for (int i = 0; i < 3; ++i) out.channel[i] = acc[i].finish();
  return out;
}

ChannelMetrics compute_metrics(const std::vector<double>& samples) {
  if (samples.empty()) throw ConfigError("metrics of an empty sample sequence");
  RunningMetrics acc;
  for (double e : samples) acc.add(e);
  return acc.finish();
}

double improvement_ratio(double sac, double baseline) { return 1.0 - sac / baseline; }

const WindowMetrics& MetricsReport::at(const std::string& controller,
                                       const std::string& window) const {
  const auto it = by_controller.find(controller);
  if (it == by_controller.end()) throw ConfigError("no metrics for controller " + controller);
  for (const auto& wm : it->second) {
    if (wm.window.name == window) return wm;
  }
  throw ConfigError("no metrics for window " + window);
}

MetricsReport build_report(const std::string& scenario, const std::vector<TimeWindow>& windows,
                           const std::vector<SimTrace>& traces) {
  MetricsReport report;
  report.scenario = scenario;
  report.windows = windows;
  for (const auto& trace : traces) {
    auto& rows = report.by_controller[trace.controller];
    rows.clear();
    for (const auto& w : windows) rows.push_back(compute_metrics(trace, w, kRadToDeg));
  }
  return report;
}

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

}  // namespace

std::string emit_tables(const MetricsReport& report) {
  static const char* kChannels[] = {"Roll", "Pitch", "Yaw"};
  std::ostringstream out;
  out.imbue(std::locale::classic());
  for (const auto& window : report.windows) {
    out << "Scenario: " << report.scenario << ", window: " << window.name << " ["
        << fixed(window.t_begin, 3) << ", " << fixed(window.t_end, 3) << "] s, error in deg\n";
    out << std::left << std::setw(8) << "Channel" << std::setw(8) << "Metric";
    for (const char* col : {"FTSMC", "RSMC", "SAC", "I1", "I2"}) {
      out << std::right << std::setw(12) << col;
    }
    out << "\n";
    const auto& f = report.at("ftsmc", window.name);
    const auto& r = report.at("rsmc", window.name);
    const auto& s = report.at("sac", window.name);
    for (int i = 0; i < 3; ++i) {
      for (int metric = 0; metric < 2; ++metric) {
        auto pick = [metric](const ChannelMetrics& m) { return metric == 0 ? m.max_e : m.rms_e; };
        const double vf = pick(f.channel[i]), vr = pick(r.channel[i]), vs = pick(s.channel[i]);
        out << std::left << std::setw(8) << (metric == 0 ? kChannels[i] : "")
            << std::setw(8) << (metric == 0 ? "MAX_e" : "RMS_e") << std::right;
        out << std::setw(12) << fixed(vf, 6) << std::setw(12) << fixed(vr, 6) << std::setw(12)
            << fixed(vs, 6) << std::setw(12) << fixed(improvement_ratio(vs, vf), 3)
            << std::setw(12) << fixed(improvement_ratio(vs, vr), 3) << "\n";
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("not a number: '" + text + "'");
  }
  return value;
}

void write_trace_csv(const SimTrace& trace, std::ostream& out) {
  const auto& cols = TraceRecord::columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  std::string line;
  for (const auto& rec : trace.records) {
    line.clear();
    const auto row = rec.to_row();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += ',';
      line += format_double(row[i]);
    }
    line += '\n';
    out << line;
  }
}

SimTrace read_trace_csv(std::istream& in) {
  SimTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace CSV is empty");
  const auto& cols = TraceRecord::columns();
  {
    std::vector<std::string> header;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
    if (header != cols) throw ConfigError("trace CSV header does not match the column list");
  }
  std::vector<double> row;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    row.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell));
    trace.records.push_back(TraceRecord::from_row(row));
  }
  if (trace.records.size() > 1) trace.step = trace.records[1].t - trace.records[0].t;
  return trace;
}

void emit_trace(const SimTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_trace_csv(trace, out);
  if (!out) throw IoError("failed writing " + path.string());
}

SimTrace parse_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return read_trace_csv(in);
}

void emit_plotdata(const SimTrace& trace, const std::vector<std::string>& signals,
                   const std::filesystem::path& path) {
  const auto& cols = TraceRecord::columns();
  std::vector<std::size_t> index;
  for (const auto& name : signals) {
    std::size_t k = 0;
    while (k < cols.size() && cols[k] != name) ++k;
    if (k == cols.size()) throw ConfigError("unknown plot signal '" + name + "'");
    index.push_back(k);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "t";
  for (const auto& name : signals) out << "," << name;
  out << "\n";
  if (!signals.empty()) {
    for (const auto& rec : trace.records) {
      const auto row = rec.to_row();
      out << format_double(rec.t);
      for (std::size_t k : index) out << "," << format_double(row[k]);
      out << "\n";
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace tiltrotor
