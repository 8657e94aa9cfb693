#include "tiltrotor/config.hpp"

#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <set>
#include <sstream>

#include "tiltrotor/errors.hpp"

namespace tiltrotor {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!keys.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

void read(const json& j, const char* key, double& out, const std::string& where) {
  if (j.contains(key)) out = get_number(j.at(key), where + "." + key);
}

void read(const json& j, const char* key, Vec3& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& a = j.at(key);
  const std::string path = where + "." + key;
  if (!a.is_array() || a.size() != 3) throw ConfigError(path + ": expected [x, y, z]");
  for (int i = 0; i < 3; ++i) out(i) = get_number(a[i], path);
}

void read(const json& j, const char* key, std::array<double, 2>& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& a = j.at(key);
  const std::string path = where + "." + key;
  if (!a.is_array() || a.size() != 2) throw ConfigError(path + ": expected [begin, end]");
  for (int i = 0; i < 2; ++i) out[i] = get_number(a[i], path);
}

json vec(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

// Reads a per-axis block given as one object or as an array of three.
template <typename T, typename ReadFn>
void read_axes(const json& j, const char* key, std::array<T, 3>& out, const std::string& where,
               ReadFn read_one) {
  if (!j.contains(key)) return;
  const json& block = j.at(key);
  const std::string path = where + "." + key;
  if (block.is_array()) {
    if (block.size() != 3) throw ConfigError(path + ": expected three axis objects");
    for (int i = 0; i < 3; ++i) read_one(block[i], out[i], path + "[" + std::to_string(i) + "]");
  } else {
    for (int i = 0; i < 3; ++i) read_one(block, out[i], path);
  }
}

template <typename T, typename WriteFn>
json write_axes(const std::array<T, 3>& in, WriteFn write_one) {
  return json::array({write_one(in[0]), write_one(in[1]), write_one(in[2])});
}

void read_surface(const json& j, SurfaceGains& g, const std::string& where) {
  check_keys(j, where, {"k_lin", "k_term", "alpha", "lambda", "beta"});
  read(j, "k_lin", g.k_lin, where);
  read(j, "k_term", g.k_term, where);
  read(j, "alpha", g.alpha, where);
  read(j, "lambda", g.lambda, where);
  read(j, "beta", g.beta, where);
}

json write_surface(const SurfaceGains& g) {
  return {{"k_lin", g.k_lin}, {"k_term", g.k_term}, {"alpha", g.alpha},
          {"lambda", g.lambda}, {"beta", g.beta}};
}

void read_adaptation(const json& j, AdaptationConfig& a, const std::string& where) {
  check_keys(j, where, {"rho", "epsilon", "sat_delta", "xi1_init", "xi2_init", "sign"});
  read(j, "rho", a.rho, where);
  read(j, "epsilon", a.epsilon, where);
  read(j, "sat_delta", a.sat_delta, where);
  read(j, "xi1_init", a.xi1_init, where);
  read(j, "xi2_init", a.xi2_init, where);
  if (j.contains("sign")) {
    if (!j.at("sign").is_number_integer()) throw ConfigError(where + ".sign: expected +1 or -1");
    a.adaptation_sign = j.at("sign").get<int>();
  }
}

json write_adaptation(const AdaptationConfig& a) {
  return {{"rho", a.rho},           {"epsilon", a.epsilon},   {"sat_delta", a.sat_delta},
          {"xi1_init", a.xi1_init}, {"xi2_init", a.xi2_init}, {"sign", a.adaptation_sign}};
}

void read_ftsmc(const json& j, FtsmcGains& g, const std::string& where) {
  check_keys(j, where, {"k_lin", "k_term", "alpha", "k_s", "k_w", "sat_delta"});
  read(j, "k_lin", g.k_lin, where);
  read(j, "k_term", g.k_term, where);
  read(j, "alpha", g.alpha, where);
  read(j, "k_s", g.k_s, where);
  read(j, "k_w", g.k_w, where);
  read(j, "sat_delta", g.sat_delta, where);
}

json write_ftsmc(const FtsmcGains& g) {
  return {{"k_lin", g.k_lin}, {"k_term", g.k_term}, {"alpha", g.alpha},
          {"k_s", g.k_s},     {"k_w", g.k_w},       {"sat_delta", g.sat_delta}};
}

void read_controller(const json& j, ControllerConfig& c, const std::string& where) {
  check_keys(j, where, {"surface", "adaptation", "ftsmc", "torque_limit"});
  read_axes(j, "surface", c.surface, where, read_surface);
  read_axes(j, "adaptation", c.adaptation, where, read_adaptation);
  read_axes(j, "ftsmc", c.ftsmc, where, read_ftsmc);
  if (j.contains("torque_limit")) {
    if (j.at("torque_limit").is_null()) {
      c.torque_limit.reset();
    } else {
      Vec3 limit = Vec3::Zero();
      read(j, "torque_limit", limit, where);
      c.torque_limit = limit;
    }
  }
}

json write_controller(const ControllerConfig& c) {
  json j;
  switch (c.kind) {
    case ControllerKind::kFtsmc:
      j["ftsmc"] = write_axes(c.ftsmc, write_ftsmc);
      break;
    case ControllerKind::kSac:
    case ControllerKind::kRsmc:
      j["surface"] = write_axes(c.surface, write_surface);
      j["adaptation"] = write_axes(c.adaptation, write_adaptation);
      break;
  }
  j["torque_limit"] = c.torque_limit ? vec(*c.torque_limit) : json(nullptr);
  return j;
}

void read_observer_gains(const json& j, ObserverGains& g, const std::string& where) {
  check_keys(j, where, {"h1", "h2", "h3"});
  read(j, "h1", g.h1, where);
  read(j, "h2", g.h2, where);
  read(j, "h3", g.h3, where);
}

json write_observer_gains(const ObserverGains& g) {
  return {{"h1", g.h1}, {"h2", g.h2}, {"h3", g.h3}};
}

void read_schedule(const json& j, TiltSchedule& s, const std::string& where) {
  check_keys(j, where, {"t0", "duration", "accel"});
  read(j, "t0", s.t0, where);
  read(j, "duration", s.duration, where);
  read(j, "accel", s.accel, where);
}

json write_schedule(const TiltSchedule& s) {
  return {{"t0", s.t0}, {"duration", s.duration}, {"accel", s.accel}};
}

void read_affine(const json& j, AffineCoefficient& c, const std::string& where) {
  check_keys(j, where, {"c0", "alpha", "beta", "p", "q", "r"});
  read(j, "c0", c.c0, where);
  read(j, "alpha", c.alpha, where);
  read(j, "beta", c.beta, where);
  read(j, "p", c.p, where);
  read(j, "q", c.q, where);
  read(j, "r", c.r, where);
}

json write_affine(const AffineCoefficient& c) {
  return {{"c0", c.c0}, {"alpha", c.alpha}, {"beta", c.beta},
          {"p", c.p},   {"q", c.q},         {"r", c.r}};
}

DisturbanceTerm read_term(const json& j, const std::string& where) {
  check_keys(j, where, {"kind", "amplitude", "omega", "t_on", "t_off"});
  DisturbanceTerm term;
  const std::string kind = j.value("kind", std::string("constant"));
  if (kind == "constant") {
    term.kind = DisturbanceTerm::Kind::kConstant;
  } else if (kind == "windowed_sine") {
    term.kind = DisturbanceTerm::Kind::kWindowedSine;
  } else {
    throw ConfigError(where + ".kind: expected constant or windowed_sine");
  }
  if (j.contains("amplitude") && j.at("amplitude").is_number()) {
    term.amplitude = Vec3::Constant(j.at("amplitude").get<double>());
  } else {
    read(j, "amplitude", term.amplitude, where);
  }
  read(j, "omega", term.omega, where);
  read(j, "t_on", term.t_on, where);
  read(j, "t_off", term.t_off, where);
  return term;
}

json write_term(const DisturbanceTerm& term) {
  return {{"kind", term.kind == DisturbanceTerm::Kind::kConstant ? "constant" : "windowed_sine"},
          {"amplitude", vec(term.amplitude)},
          {"omega", term.omega},
          {"t_on", term.t_on},
          {"t_off", term.t_off}};
}

}  // namespace

namespace {

ScenarioConfig parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  const std::string root = "config";
  check_keys(j, root,
             {"schema", "name", "duration", "step", "seed", "initial", "reference", "controller",
              "gains", "observer", "tilt", "windows", "allocation", "disturbance", "vehicle",
              "aero", "noise"});
  if (j.contains("schema") && j.at("schema") != ScenarioConfig::kSchema) {
    throw ConfigError("unsupported schema tag " + j.at("schema").dump() + " (expected \"" +
                      ScenarioConfig::kSchema + "\")");
  }

  ScenarioConfig cfg = default_scenario();
  if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
  read(j, "duration", cfg.duration, root);
  read(j, "step", cfg.step, root);
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("initial")) {
    const json& b = j.at("initial");
    const std::string w = root + ".initial";
    check_keys(b, w, {"body_velocity", "body_rates", "euler", "position"});
    Vec3 v{cfg.initial.u, cfg.initial.v, cfg.initial.w};
    Vec3 r = cfg.initial.rates(), e = cfg.initial.euler();
    Vec3 p{cfg.initial.pn, cfg.initial.pe, cfg.initial.h};
    read(b, "body_velocity", v, w);
    read(b, "body_rates", r, w);
    read(b, "euler", e, w);
    read(b, "position", p, w);
    cfg.initial = {v(0), v(1), v(2), r(0), r(1), r(2), e(0), e(1), e(2), p(0), p(1), p(2)};
  }
  if (j.contains("reference")) {
    const json& b = j.at("reference");
    const std::string w = root + ".reference";
    check_keys(b, w, {"angle", "rate", "accel", "jerk"});
    read(b, "angle", cfg.reference.angle, w);
    read(b, "rate", cfg.reference.rate, w);
    read(b, "accel", cfg.reference.accel, w);
    read(b, "jerk", cfg.reference.jerk, w);
  }
  if (j.contains("controller")) {
    cfg.controller = controller_kind_from_string(j.at("controller").get<std::string>());
  }
  if (j.contains("gains")) {
    const json& b = j.at("gains");
    const std::string w = root + ".gains";
    check_keys(b, w, {"sac", "rsmc", "ftsmc"});
    if (b.contains("sac")) read_controller(b.at("sac"), cfg.sac, w + ".sac");
    if (b.contains("rsmc")) read_controller(b.at("rsmc"), cfg.rsmc, w + ".rsmc");
    if (b.contains("ftsmc")) read_controller(b.at("ftsmc"), cfg.ftsmc, w + ".ftsmc");
  }
  if (j.contains("observer")) {
    const json& b = j.at("observer");
    const std::string w = root + ".observer";
    check_keys(b, w, {"gains", "switching", "sat_delta"});
    read_axes(b, "gains", cfg.observer, w, read_observer_gains);
    if (b.contains("switching")) {
      const std::string s = b.at("switching").get<std::string>();
      if (s == "sign") {
        cfg.observer_switching = ObserverSwitching::kSign;
      } else if (s == "saturation") {
        cfg.observer_switching = ObserverSwitching::kSaturation;
      } else {
        throw ConfigError(w + ".switching: expected sign or saturation");
      }
    }
    read(b, "sat_delta", cfg.observer_sat_delta, w);
  }
  if (j.contains("tilt")) {
    const json& b = j.at("tilt");
    const std::string w = root + ".tilt";
    check_keys(b, w, {"conversion", "reconversion"});
    if (b.contains("conversion")) read_schedule(b.at("conversion"), cfg.conversion, w);
    if (b.contains("reconversion")) read_schedule(b.at("reconversion"), cfg.reconversion, w);
  }
  if (j.contains("windows")) {
    const json& b = j.at("windows");
    const std::string w = root + ".windows";
    check_keys(b, w, {"conversion", "reconversion"});
    read(b, "conversion", cfg.windows.conversion, w);
    read(b, "reconversion", cfg.windows.reconversion, w);
  }
  if (j.contains("allocation")) {
    const json& b = j.at("allocation");
    const std::string w = root + ".allocation";
    check_keys(b, w,
               {"thrust_policy", "omega_max", "forward_tilt_margin", "forward_thrust",
                "surface_authority"});
    if (b.contains("thrust_policy")) {
      const std::string s = b.at("thrust_policy").get<std::string>();
      if (s == "tilt_share") {
        cfg.thrust_policy = ThrustPolicy::kTiltShare;
      } else if (s == "constant_hover") {
        cfg.thrust_policy = ThrustPolicy::kConstantHover;
      } else {
        throw ConfigError(w + ".thrust_policy: expected tilt_share or constant_hover");
      }
    }
    read(b, "omega_max", cfg.omega_max, w);
    read(b, "forward_tilt_margin", cfg.forward_tilt_margin, w);
    read(b, "forward_thrust", cfg.forward_thrust, w);
    read(b, "surface_authority", cfg.surface_authority, w);
  }
  if (j.contains("disturbance")) {
    const json& b = j.at("disturbance");
    const std::string w = root + ".disturbance";
    if (!b.is_array()) throw ConfigError(w + ": expected an array of terms");
    cfg.disturbance.terms.clear();
    for (std::size_t i = 0; i < b.size(); ++i) {
      cfg.disturbance.terms.push_back(read_term(b[i], w + "[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("vehicle")) {
    const json& b = j.at("vehicle");
    const std::string w = root + ".vehicle";
    check_keys(b, w,
               {"m", "g", "Ix", "Iy", "Iz", "S", "cbar", "span", "kt", "kd", "d_arm", "rho_air"});
    VehicleParams& v = cfg.vehicle;
    read(b, "m", v.m, w);
    read(b, "g", v.g, w);
    read(b, "Ix", v.Ix, w);
    read(b, "Iy", v.Iy, w);
    read(b, "Iz", v.Iz, w);
    read(b, "S", v.S, w);
    read(b, "cbar", v.cbar, w);
    read(b, "span", v.span, w);
    read(b, "kt", v.kt, w);
    read(b, "kd", v.kd, w);
    read(b, "d_arm", v.d_arm, w);
    read(b, "rho_air", v.rho_air, w);
  }
  if (j.contains("aero")) {
    const json& b = j.at("aero");
    const std::string w = root + ".aero";
    check_keys(b, w, {"Cx", "Cy", "Cz", "Cl", "Cm", "Cn"});
    AeroCoefficients& a = cfg.aero;
    for (auto [key, coef] : {std::pair{"Cx", &a.Cx}, std::pair{"Cy", &a.Cy},
                             std::pair{"Cz", &a.Cz}, std::pair{"Cl", &a.Cl},
                             std::pair{"Cm", &a.Cm}, std::pair{"Cn", &a.Cn}}) {
      if (b.contains(key)) read_affine(b.at(key), *coef, w + "." + key);
    }
  }
  if (j.contains("noise")) {
    const json& b = j.at("noise");
    const std::string w = root + ".noise";
    check_keys(b, w, {"angle_std"});
    read(b, "angle_std", cfg.angle_noise_std, w);
  }
  cfg.validate();
  return cfg;
}

}  // namespace

ScenarioConfig scenario_from_json_text(const std::string& text) {
  try {
    return parse_scenario(text);
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
}

std::string scenario_to_json_text(const ScenarioConfig& cfg) {
  json j;
  j["schema"] = ScenarioConfig::kSchema;
  j["name"] = cfg.name;
  j["duration"] = cfg.duration;
  j["step"] = cfg.step;
  j["seed"] = cfg.seed;
  const BodyState& s = cfg.initial;
  j["initial"] = {{"body_velocity", json::array({s.u, s.v, s.w})},
                  {"body_rates", json::array({s.p, s.q, s.r})},
                  {"euler", json::array({s.phi, s.theta, s.psi})},
                  {"position", json::array({s.pn, s.pe, s.h})}};
  j["reference"] = {{"angle", vec(cfg.reference.angle)},
                    {"rate", vec(cfg.reference.rate)},
                    {"accel", vec(cfg.reference.accel)},
                    {"jerk", vec(cfg.reference.jerk)}};
  j["controller"] = to_string(cfg.controller);
  j["gains"] = {{"sac", write_controller(cfg.sac)},
                {"rsmc", write_controller(cfg.rsmc)},
                {"ftsmc", write_controller(cfg.ftsmc)}};
  j["observer"] = {
      {"gains", write_axes(cfg.observer, write_observer_gains)},
      {"switching", cfg.observer_switching == ObserverSwitching::kSign ? "sign" : "saturation"},
      {"sat_delta", cfg.observer_sat_delta}};
  j["tilt"] = {{"conversion", write_schedule(cfg.conversion)},
               {"reconversion", write_schedule(cfg.reconversion)}};
  j["windows"] = {{"conversion", cfg.windows.conversion},
                  {"reconversion", cfg.windows.reconversion}};
  j["allocation"] = {
      {"thrust_policy",
       cfg.thrust_policy == ThrustPolicy::kTiltShare ? "tilt_share" : "constant_hover"},
      {"omega_max", cfg.omega_max},
      {"forward_tilt_margin", cfg.forward_tilt_margin},
      {"forward_thrust", cfg.forward_thrust},
      {"surface_authority", vec(cfg.surface_authority)}};
  j["disturbance"] = json::array();
  for (const auto& term : cfg.disturbance.terms) j["disturbance"].push_back(write_term(term));
  const VehicleParams& v = cfg.vehicle;
  j["vehicle"] = {{"m", v.m},       {"g", v.g},       {"Ix", v.Ix},     {"Iy", v.Iy},
                  {"Iz", v.Iz},     {"S", v.S},       {"cbar", v.cbar}, {"span", v.span},
                  {"kt", v.kt},     {"kd", v.kd},     {"d_arm", v.d_arm},
                  {"rho_air", v.rho_air}};
  const AeroCoefficients& a = cfg.aero;
  j["aero"] = {{"Cx", write_affine(a.Cx)}, {"Cy", write_affine(a.Cy)},
               {"Cz", write_affine(a.Cz)}, {"Cl", write_affine(a.Cl)},
               {"Cm", write_affine(a.Cm)}, {"Cn", write_affine(a.Cn)}};
  j["noise"] = {{"angle_std", vec(cfg.angle_noise_std)}};
  return j.dump(2) + "\n";
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return scenario_from_json_text(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << scenario_to_json_text(config);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace tiltrotor
