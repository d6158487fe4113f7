#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "modquad/control.hpp"
#include "modquad/error.hpp"
#include "modquad/simulation.hpp"
#include "modquad/trajectories.hpp"
#include "modquad/vehicle.hpp"

namespace modquad {

struct ModuleEntry {
  ModuleKind kind = ModuleKind::kR;
  Vec3 r_star = Vec3::Zero();  // R: rotation vector of R*, rad
  double eta = 0.0;            // T: tilt, rad
  std::array<Vec3, 4> rotors{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};  // custom
  GridCell cell{0, 0, 0};
  double yaw = 0.0;  // module yaw in the structure, rad

  bool operator==(const ModuleEntry&) const = default;
};

struct ScenarioConfig {
  double duration = 0.0;
  double dt_ctrl = 0.002;
  double dt_sim = 0.001;
  double motor_time_constant = 0.0;
  double motor_deadzone = 0.0;
  TrajectoryDef trajectory = HoverParams{};

  bool operator==(const ScenarioConfig&) const = default;
};

struct StructureConfig {
  std::string name;
  ModuleParams params;
  double f_max = 0.645;
  std::vector<ModuleEntry> modules;
  ControllerGains gains;
  std::optional<ScenarioConfig> scenario;

  bool operator==(const StructureConfig&) const = default;
};

struct ConfigIssue {
  int line = 0;  // 1-based, 0 when unknown
  int column = 0;
  ErrorCode code = ErrorCode::kSchemaError;
  std::string message;
};

/// Thrown by parse_config; carries every issue found, the code is the first's.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Parses the YAML config format. Throws ConfigError (ParseError, SchemaError
/// or UnknownKey).
StructureConfig parse_config(const std::string& text);

/// Reads and parses a file. I/O failures throw Error(kIo).
StructureConfig load_config(const std::string& path);

/// Canonical text: radians, full precision. parse_config(render_config(c)) == c.
std::string render_config(const StructureConfig& config);

/// Module spec and placement for one entry.
ModulePlacement make_placement(const ModuleEntry& entry, const ModuleParams& params);

StructureModel build_structure(const StructureConfig& config);

ScenarioOptions scenario_options(const StructureConfig& config);

}  // namespace modquad
