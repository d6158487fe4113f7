#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "modquad/simulation.hpp"

namespace modquad {

/// Fixed leading columns; then u1..u4n (commanded thrust, N) and sat.
inline constexpr const char* kTelemetryColumns =
    "t,rx,ry,rz,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,rdx,rdy,rdz,yaw_d,pitch_d";

std::string telemetry_header(int rotors);

/// One CSV row per sample, values printed with %.17g. The quaternion is
/// ^W R_S with qw >= 0; yaw_d and pitch_d are the z-y-x angles of the
/// controller's desired F-frame attitude.
void write_telemetry_csv(std::ostream& out, const Telemetry& telemetry);

/// Sidecar JSON: dof, f_frame (row-major), f_max_n, rotors, diverged, failure.
std::string telemetry_meta_json(const Telemetry& telemetry);

/// Writes <path> and <path>.meta.json. Throws Error(kIo).
void save_telemetry(const std::string& path, const Telemetry& telemetry);

struct TelemetryRow {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Eigen::Quaterniond attitude = Eigen::Quaterniond::Identity();
  Vec3 angular_velocity = Vec3::Zero();
  Vec3 position_d = Vec3::Zero();
  double yaw_d = 0.0;
  double pitch_d = 0.0;
  Eigen::VectorXd u;
  int saturated = 0;
};

struct TelemetryMeta {
  int dof = 6;
  Mat3 f_frame = Mat3::Identity();
  double f_max = 0.0;
  bool diverged = false;
  bool present = false;  // false when no sidecar was found
};

struct TelemetryTable {
  int rotors = 0;
  std::vector<TelemetryRow> rows;
  TelemetryMeta meta;
};

/// Throws MalformedTelemetry on a bad header, column count or number.
TelemetryTable read_telemetry_csv(std::istream& in);

/// Reads <path> and, when present, <path>.meta.json.
TelemetryTable load_telemetry(const std::string& path);

}  // namespace modquad
