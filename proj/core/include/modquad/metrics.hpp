#pragma once

#include <array>
#include <optional>
#include <string>

#include "modquad/telemetry_io.hpp"

namespace modquad {

inline constexpr double kDefaultSkip = 5.0;

struct MetricsReport {
  std::array<double, 3> position_max{};  // m, per world axis
  std::array<double, 3> position_rms{};
  /// deg, components of log(R_d^T R_F) about F-frame x (roll), y (pitch),
  /// z (yaw). Roll is absent for structures with fewer than 6 DOF, whose
  /// desired roll is not logged.
  std::array<std::optional<double>, 3> attitude_max{};
  std::array<std::optional<double>, 3> attitude_rms{};
  double attitude_angle_max = 0.0;  // deg, full rotation angle
  double saturation_fraction = 0.0;  // saturated rotor-samples / all rotor-samples
  bool diverged = false;
  int samples = 0;
  double skip = kDefaultSkip;
  int dof = 6;
};

/// Errors over rows with t >= skip. Row order is irrelevant. Throws
/// MalformedTelemetry when no row falls inside the window.
MetricsReport compute_metrics(const TelemetryTable& table, double skip = kDefaultSkip);

std::string to_json(const MetricsReport& report);
std::string to_text(const MetricsReport& report);

}  // namespace modquad
