#include "modquad/config.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace modquad {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string join(const std::vector<ConfigIssue>& issues) {
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) out << "; ";
    if (issues[i].line > 0) out << "line " << issues[i].line << ": ";
    out << issues[i].message;
  }
  return out.str();
}

class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void fail(const YAML::Node& at, ErrorCode code, const std::string& msg) {
    const auto mark = at.Mark();
    issues.push_back({mark.line >= 0 ? mark.line + 1 : 0, mark.column >= 0 ? mark.column + 1 : 0,
                      code, msg});
  }

  bool expect_map(const YAML::Node& node, const std::string& what) {
    if (node.IsMap()) return true;
    fail(node, ErrorCode::kSchemaError, what + " must be a mapping");
    return false;
  }

  void only_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                 const std::string& where) {
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        fail(kv.first, ErrorCode::kUnknownKey, "unknown key '" + key + "' in " + where);
      }
    }
  }

  bool number(const YAML::Node& node, const std::string& key, double& out) {
    try {
      out = node.as<double>();
      return true;
    } catch (const YAML::Exception&) {
      fail(node, ErrorCode::kSchemaError, "'" + key + "' must be a number");
      return false;
    }
  }

  void opt_number(const YAML::Node& map, const std::string& key, double& out) {
    if (const auto n = map[key]) number(n, key, out);
  }

  void req_number(const YAML::Node& map, const std::string& key, double& out) {
    if (const auto n = map[key]) {
      number(n, key, out);
    } else {
      fail(map, ErrorCode::kSchemaError, "missing required key '" + key + "'");
    }
  }

  // key_rad or key_deg, stored in radians.
  void opt_angle(const YAML::Node& map, const std::string& key, double& out) {
    const auto rad = map[key + "_rad"];
    const auto deg = map[key + "_deg"];
    if (rad && deg) {
      fail(deg, ErrorCode::kSchemaError, "give only one of '" + key + "_rad' and '" + key + "_deg'");
      return;
    }
    double v = 0.0;
    if (rad && number(rad, key + "_rad", v)) out = v;
    if (deg && number(deg, key + "_deg", v)) out = v * kDeg;
  }

  void req_angle(const YAML::Node& map, const std::string& key, double& out) {
    if (!map[key + "_rad"] && !map[key + "_deg"]) {
      fail(map, ErrorCode::kSchemaError, "missing required key '" + key + "_rad' or '" + key + "_deg'");
      return;
    }
    opt_angle(map, key, out);
  }

  bool vector(const YAML::Node& node, const std::string& key, int size, Eigen::VectorXd& out) {
    if (!node.IsSequence() || static_cast<int>(node.size()) != size) {
      fail(node, ErrorCode::kSchemaError,
           "'" + key + "' must be a list of " + std::to_string(size) + " numbers");
      return false;
    }
    out.resize(size);
    bool ok = true;
    for (int i = 0; i < size; ++i) ok = number(node[i], key, out(i)) && ok;
    return ok;
  }

  void opt_vec3(const YAML::Node& map, const std::string& key, Vec3& out) {
    Eigen::VectorXd v;
    if (const auto n = map[key]; n && vector(n, key, 3, v)) out = v;
  }

  void opt_vec2(const YAML::Node& map, const std::string& key, Eigen::Vector2d& out) {
    Eigen::VectorXd v;
    if (const auto n = map[key]; n && vector(n, key, 2, v)) out = v;
  }

  // A diagonal gain: scalar or three numbers.
  void opt_gain(const YAML::Node& map, const std::string& key, Vec3& out) {
    const auto n = map[key];
    if (!n) return;
    if (n.IsScalar()) {
      double v = 0.0;
      if (number(n, key, v)) out.setConstant(v);
      return;
    }
    opt_vec3(map, key, out);
  }
};

ModuleParams read_vehicle(Reader& rd, const YAML::Node& node, double& f_max) {
  ModuleParams p;
  if (!node) return p;
  if (!rd.expect_map(node, "'vehicle'")) return p;
  rd.only_keys(node, {"mass_kg", "arm_half_m", "body_dims_m", "k_f", "k_m", "f_max_n"}, "vehicle");
  rd.opt_number(node, "mass_kg", p.mass_kg);
  rd.opt_number(node, "arm_half_m", p.arm_half_m);
  rd.opt_vec3(node, "body_dims_m", p.body_dims_m);
  rd.opt_number(node, "k_f", p.k_f);
  rd.opt_number(node, "k_m", p.k_m);
  rd.opt_number(node, "f_max_n", f_max);
  try {
    validate(p);
  } catch (const Error& e) {
    rd.fail(node, ErrorCode::kSchemaError, e.what());
  }
  if (!(f_max > 0.0)) rd.fail(node, ErrorCode::kSchemaError, "f_max_n must be positive");
  return p;
}

std::optional<ModuleEntry> read_module(Reader& rd, const YAML::Node& node) {
  if (!rd.expect_map(node, "module entry")) return std::nullopt;
  ModuleEntry m;
  const auto kind = node["kind"];
  std::string k = kind ? kind.as<std::string>("") : "";
  std::set<std::string> allowed{"kind", "cell", "yaw_rad", "yaw_deg"};
  if (k == "R") {
    m.kind = ModuleKind::kR;
    allowed.insert({"r_star_axis_angle_rad", "r_star_euler_rad", "r_star_euler_deg"});
  } else if (k == "T") {
    m.kind = ModuleKind::kT;
    allowed.insert({"eta_rad", "eta_deg"});
  } else if (k == "custom") {
    m.kind = ModuleKind::kCustom;
    allowed.insert("rotors_axis_angle_rad");
  } else {
    rd.fail(kind ? kind : node, ErrorCode::kSchemaError, "module kind must be R, T or custom");
    return std::nullopt;
  }
  rd.only_keys(node, allowed, std::string("module of kind ") + k);

  Eigen::VectorXd v;
  if (const auto c = node["cell"]) {
    const int n = c.IsSequence() ? static_cast<int>(c.size()) : 0;
    if ((n == 2 || n == 3) && rd.vector(c, "cell", n, v)) {
      for (int i = 0; i < n; ++i) {
        if (v(i) != std::round(v(i))) rd.fail(c, ErrorCode::kSchemaError, "cell entries must be integers");
        m.cell[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(v(i)));
      }
    } else if (n != 2 && n != 3) {
      rd.fail(c, ErrorCode::kSchemaError, "'cell' must be [x, y] or [x, y, z]");
    }
  } else {
    rd.fail(node, ErrorCode::kSchemaError, "module entry needs a 'cell'");
  }
  rd.opt_angle(node, "yaw", m.yaw);

  if (m.kind == ModuleKind::kR) {
    int given = 0;
    if (const auto n = node["r_star_axis_angle_rad"]; n && ++given && rd.vector(n, "r_star_axis_angle_rad", 3, v)) {
      m.r_star = v;
    }
    for (const auto& [key, scale] : {std::pair{"r_star_euler_rad", 1.0}, std::pair{"r_star_euler_deg", kDeg}}) {
      if (const auto n = node[key]; n && ++given && rd.vector(n, key, 3, v)) {
        const Mat3 r = from_euler_zyx({v(0) * scale, v(1) * scale, v(2) * scale});
        m.r_star = so3_log(r);
      }
    }
    if (given > 1) rd.fail(node, ErrorCode::kSchemaError, "give R* in exactly one form");
  } else if (m.kind == ModuleKind::kT) {
    rd.req_angle(node, "eta", m.eta);
    if (!(std::abs(m.eta) < std::numbers::pi / 2.0)) {
      rd.fail(node, ErrorCode::kSchemaError, "T-module tilt must satisfy |eta| < 90 deg");
    }
  } else {
    const auto n = node["rotors_axis_angle_rad"];
    if (!n || !n.IsSequence() || n.size() != 4) {
      rd.fail(n ? n : node, ErrorCode::kSchemaError,
              "custom module needs 'rotors_axis_angle_rad' with four rotation vectors");
    } else {
      for (std::size_t j = 0; j < 4; ++j) {
        if (rd.vector(n[j], "rotors_axis_angle_rad", 3, v)) m.rotors[j] = v;
      }
    }
  }
  return m;
}

ControllerGains read_gains(Reader& rd, const YAML::Node& node) {
  ControllerGains g;
  if (!node) return g;
  if (!rd.expect_map(node, "'gains'")) return g;
  rd.only_keys(node, {"k_r", "k_v", "k_R", "k_omega", "k_i", "integral_limit_m_s"}, "gains");
  rd.opt_gain(node, "k_r", g.k_r);
  rd.opt_gain(node, "k_v", g.k_v);
  rd.opt_gain(node, "k_R", g.k_R);
  rd.opt_gain(node, "k_omega", g.k_omega);
  rd.opt_gain(node, "k_i", g.k_i);
  rd.opt_number(node, "integral_limit_m_s", g.integral_limit);
  try {
    validate(g);
  } catch (const Error& e) {
    rd.fail(node, ErrorCode::kSchemaError, e.what());
  }
  return g;
}

TrajectoryDef read_trajectory(Reader& rd, const YAML::Node& node) {
  if (!node) {
    return HoverParams{};
  }
  if (!rd.expect_map(node, "'trajectory'")) return HoverParams{};
  const std::string kind = node["kind"] ? node["kind"].as<std::string>("") : "";
  TrajectoryDef def = HoverParams{};
  if (kind == "helix") {
    HelixParams p;
    rd.only_keys(node, {"kind", "center_m", "radius_m", "z_range_m", "z_period_s", "xy_period_s",
                        "yaw_period_s"}, "helix trajectory");
    rd.opt_vec2(node, "center_m", p.center);
    rd.opt_number(node, "radius_m", p.radius);
    Eigen::Vector2d z(p.z_min, p.z_max);
    rd.opt_vec2(node, "z_range_m", z);
    p.z_min = z(0);
    p.z_max = z(1);
    rd.opt_number(node, "z_period_s", p.z_period);
    rd.opt_number(node, "xy_period_s", p.xy_period);
    rd.opt_number(node, "yaw_period_s", p.yaw_period);
    def = p;
  } else if (kind == "rectangle") {
    RectangleParams p;
    rd.only_keys(node, {"kind", "start_m", "length_m", "width_m", "lap_time_s", "pitch_hold_rad",
                        "pitch_hold_deg", "yaw_hold_rad", "yaw_hold_deg"}, "rectangle trajectory");
    rd.opt_vec3(node, "start_m", p.start);
    rd.opt_number(node, "length_m", p.length);
    rd.opt_number(node, "width_m", p.width);
    rd.opt_number(node, "lap_time_s", p.lap_time);
    rd.opt_angle(node, "pitch_hold", p.pitch_hold);
    rd.opt_angle(node, "yaw_hold", p.yaw_hold);
    def = p;
  } else if (kind == "attitude_sine") {
    AttitudeSineParams p;
    rd.only_keys(node, {"kind", "axis", "amplitude_rad", "amplitude_deg", "period_s",
                        "hover_point_m"}, "attitude_sine trajectory");
    const std::string axis = node["axis"] ? node["axis"].as<std::string>("") : "y";
    if (axis == "y") {
      p.axis = Axis::kY;
    } else if (axis == "z") {
      p.axis = Axis::kZ;
    } else {
      rd.fail(node["axis"], ErrorCode::kSchemaError, "attitude_sine axis must be y or z");
    }
    rd.req_angle(node, "amplitude", p.amplitude);
    rd.opt_number(node, "period_s", p.period);
    rd.opt_vec3(node, "hover_point_m", p.hover_point);
    def = p;
  } else if (kind == "quintic_chain") {
    QuinticChainParams p;
    rd.only_keys(node, {"kind", "waypoints", "durations_s"}, "quintic_chain trajectory");
    const auto wps = node["waypoints"];
    if (!wps || !wps.IsSequence()) {
      rd.fail(wps ? wps : node, ErrorCode::kSchemaError, "'waypoints' must be a list");
    } else {
      for (const auto& w : wps) {
        if (!rd.expect_map(w, "waypoint")) continue;
        rd.only_keys(w, {"position_m", "yaw_rad", "yaw_deg", "pitch_rad", "pitch_deg"}, "waypoint");
        Waypoint wp;
        if (!w["position_m"]) rd.fail(w, ErrorCode::kSchemaError, "waypoint needs 'position_m'");
        rd.opt_vec3(w, "position_m", wp.position);
        rd.opt_angle(w, "yaw", wp.yaw);
        rd.opt_angle(w, "pitch", wp.pitch);
        p.waypoints.push_back(wp);
      }
    }
    const auto ds = node["durations_s"];
    if (!ds || !ds.IsSequence()) {
      rd.fail(ds ? ds : node, ErrorCode::kSchemaError, "'durations_s' must be a list");
    } else {
      for (const auto& d : ds) {
        double v = 0.0;
        if (rd.number(d, "durations_s", v)) p.durations.push_back(v);
      }
    }
    def = p;
  } else if (kind == "hover") {
    HoverParams p;
    rd.only_keys(node, {"kind", "position_m", "yaw_rad", "yaw_deg", "pitch_rad", "pitch_deg"},
                 "hover trajectory");
    rd.opt_vec3(node, "position_m", p.position);
    rd.opt_angle(node, "yaw", p.yaw);
    rd.opt_angle(node, "pitch", p.pitch);
    def = p;
  } else {
    rd.fail(node["kind"] ? node["kind"] : node, ErrorCode::kSchemaError,
            "trajectory kind must be helix, rectangle, attitude_sine, quintic_chain or hover");
    return def;
  }
  try {
    validate(def);
  } catch (const Error& e) {
    rd.fail(node, ErrorCode::kSchemaError, e.what());
  }
  return def;
}

std::optional<ScenarioConfig> read_scenario(Reader& rd, const YAML::Node& node) {
  if (!node) return std::nullopt;
  if (!rd.expect_map(node, "'scenario'")) return std::nullopt;
  rd.only_keys(node, {"duration_s", "dt_ctrl_s", "dt_sim_s", "motor_time_constant_s",
                      "motor_deadzone_n", "trajectory"}, "scenario");
  ScenarioConfig s;
  rd.req_number(node, "duration_s", s.duration);
  rd.opt_number(node, "dt_ctrl_s", s.dt_ctrl);
  rd.opt_number(node, "dt_sim_s", s.dt_sim);
  rd.opt_number(node, "motor_time_constant_s", s.motor_time_constant);
  rd.opt_number(node, "motor_deadzone_n", s.motor_deadzone);
  if (!node["trajectory"]) rd.fail(node, ErrorCode::kSchemaError, "scenario needs a 'trajectory'");
  s.trajectory = read_trajectory(rd, node["trajectory"]);
  return s;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string vec(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v(i));
  return s + "]";
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error(issues.empty() ? ErrorCode::kSchemaError : issues.front().code, join(issues)),
      issues_(std::move(issues)) {}

StructureConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError({{e.mark.line + 1, e.mark.column + 1, ErrorCode::kParseError, e.msg}});
  }

  Reader rd;
  StructureConfig c;
  if (root.IsNull()) {
    throw ConfigError({{0, 0, ErrorCode::kSchemaError, "empty config: no modules"}});
  }
  if (!rd.expect_map(root, "the document")) throw ConfigError(rd.issues);
  rd.only_keys(root, {"name", "vehicle", "modules", "gains", "scenario"}, "the document");
  if (const auto n = root["name"]) c.name = n.as<std::string>("");
  c.params = read_vehicle(rd, root["vehicle"], c.f_max);

  const auto modules = root["modules"];
  if (!modules || !modules.IsSequence() || modules.size() == 0) {
    rd.fail(modules ? modules : root, ErrorCode::kSchemaError, "no modules");
  } else {
    std::set<GridCell> seen;
    for (const auto& m : modules) {
      auto entry = read_module(rd, m);
      if (!entry) continue;
      if (!seen.insert(entry->cell).second) {
        rd.fail(m, ErrorCode::kSchemaError, "two modules overlap at cell (" +
                                                std::to_string(entry->cell[0]) + ", " +
                                                std::to_string(entry->cell[1]) + ", " +
                                                std::to_string(entry->cell[2]) + ")");
      }
      c.modules.push_back(*entry);
    }
  }
  c.gains = read_gains(rd, root["gains"]);
  c.scenario = read_scenario(rd, root["scenario"]);
  if (c.scenario) {
    try {
      validate(scenario_options(c));
    } catch (const Error& e) {
      rd.fail(root["scenario"], ErrorCode::kSchemaError, e.what());
    }
  }
  if (!rd.issues.empty()) throw ConfigError(rd.issues);
  return c;
}

StructureConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string render_config(const StructureConfig& c) {
  std::ostringstream o;
  if (!c.name.empty()) o << "name: " << YAML::Node(c.name) << "\n";
  o << "vehicle:\n"
    << "  mass_kg: " << num(c.params.mass_kg) << "\n"
    << "  arm_half_m: " << num(c.params.arm_half_m) << "\n"
    << "  body_dims_m: " << vec(c.params.body_dims_m) << "\n"
    << "  k_f: " << num(c.params.k_f) << "\n"
    << "  k_m: " << num(c.params.k_m) << "\n"
    << "  f_max_n: " << num(c.f_max) << "\n";
  o << "modules:\n";
  for (const auto& m : c.modules) {
    o << "  - kind: " << to_string(m.kind) << "\n"
      << "    cell: [" << m.cell[0] << ", " << m.cell[1] << ", " << m.cell[2] << "]\n"
      << "    yaw_rad: " << num(m.yaw) << "\n";
    switch (m.kind) {
      case ModuleKind::kR:
        o << "    r_star_axis_angle_rad: " << vec(m.r_star) << "\n";
        break;
      case ModuleKind::kT:
        o << "    eta_rad: " << num(m.eta) << "\n";
        break;
      case ModuleKind::kCustom:
        o << "    rotors_axis_angle_rad:\n";
        for (const auto& r : m.rotors) o << "      - " << vec(r) << "\n";
        break;
    }
  }
  const auto& g = c.gains;
  o << "gains:\n"
    << "  k_r: " << vec(g.k_r) << "\n"
    << "  k_v: " << vec(g.k_v) << "\n"
    << "  k_R: " << vec(g.k_R) << "\n"
    << "  k_omega: " << vec(g.k_omega) << "\n"
    << "  k_i: " << vec(g.k_i) << "\n"
    << "  integral_limit_m_s: " << num(g.integral_limit) << "\n";
  if (c.scenario) {
    const auto& s = *c.scenario;
    o << "scenario:\n"
      << "  duration_s: " << num(s.duration) << "\n"
      << "  dt_ctrl_s: " << num(s.dt_ctrl) << "\n"
      << "  dt_sim_s: " << num(s.dt_sim) << "\n"
      << "  motor_time_constant_s: " << num(s.motor_time_constant) << "\n"
      << "  motor_deadzone_n: " << num(s.motor_deadzone) << "\n"
      << "  trajectory:\n"
      << "    kind: " << trajectory_kind(s.trajectory) << "\n";
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, HelixParams>) {
            o << "    center_m: " << vec(p.center) << "\n"
              << "    radius_m: " << num(p.radius) << "\n"
              << "    z_range_m: [" << num(p.z_min) << ", " << num(p.z_max) << "]\n"
              << "    z_period_s: " << num(p.z_period) << "\n"
              << "    xy_period_s: " << num(p.xy_period) << "\n"
              << "    yaw_period_s: " << num(p.yaw_period) << "\n";
          } else if constexpr (std::is_same_v<T, RectangleParams>) {
            o << "    start_m: " << vec(p.start) << "\n"
              << "    length_m: " << num(p.length) << "\n"
              << "    width_m: " << num(p.width) << "\n"
              << "    lap_time_s: " << num(p.lap_time) << "\n"
              << "    pitch_hold_rad: " << num(p.pitch_hold) << "\n"
              << "    yaw_hold_rad: " << num(p.yaw_hold) << "\n";
          } else if constexpr (std::is_same_v<T, AttitudeSineParams>) {
            o << "    axis: " << (p.axis == Axis::kZ ? "z" : "y") << "\n"
              << "    amplitude_rad: " << num(p.amplitude) << "\n"
              << "    period_s: " << num(p.period) << "\n"
              << "    hover_point_m: " << vec(p.hover_point) << "\n";
          } else if constexpr (std::is_same_v<T, QuinticChainParams>) {
            o << "    waypoints:\n";
            for (const auto& w : p.waypoints) {
              o << "      - position_m: " << vec(w.position) << "\n"
                << "        yaw_rad: " << num(w.yaw) << "\n"
                << "        pitch_rad: " << num(w.pitch) << "\n";
            }
            o << "    durations_s: [";
            for (std::size_t i = 0; i < p.durations.size(); ++i) {
              o << (i ? ", " : "") << num(p.durations[i]);
            }
            o << "]\n";
          } else {
            o << "    position_m: " << vec(p.position) << "\n"
              << "    yaw_rad: " << num(p.yaw) << "\n"
              << "    pitch_rad: " << num(p.pitch) << "\n";
          }
        },
        s.trajectory);
  }
  return o.str();
}

ModulePlacement make_placement(const ModuleEntry& e, const ModuleParams& params) {
  ModulePlacement p;
  p.cell = e.cell;
  p.rotation = rot_principal(Axis::kZ, e.yaw);
  switch (e.kind) {
    case ModuleKind::kR:
      p.module = make_r_module(so3_exp(e.r_star, 1.0), params);
      break;
    case ModuleKind::kT:
      p.module = make_t_module(e.eta, params);
      break;
    case ModuleKind::kCustom: {
      std::array<Mat3, 4> r;
      for (std::size_t j = 0; j < 4; ++j) r[j] = so3_exp(e.rotors[j], 1.0);
      p.module = make_custom_module(r, params);
      break;
    }
  }
  return p;
}

StructureModel build_structure(const StructureConfig& c) {
  std::vector<ModulePlacement> placements;
  placements.reserve(c.modules.size());
  for (const auto& m : c.modules) placements.push_back(make_placement(m, c.params));
  return assemble_structure(placements);
}

ScenarioOptions scenario_options(const StructureConfig& c) {
  if (!c.scenario) throw Error(ErrorCode::kSchemaError, "config has no 'scenario' block");
  ScenarioOptions o;
  o.duration = c.scenario->duration;
  o.dt_ctrl = c.scenario->dt_ctrl;
  o.dt_sim = c.scenario->dt_sim;
  o.motor.f_max = c.f_max;
  o.motor.time_constant = c.scenario->motor_time_constant;
  o.motor.deadzone = c.scenario->motor_deadzone;
  return o;
}

}  // namespace modquad
