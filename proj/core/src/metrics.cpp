#include "modquad/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "modquad/error.hpp"

namespace modquad {

MetricsReport compute_metrics(const TelemetryTable& table, double skip) {
  constexpr double kToDeg = 180.0 / std::numbers::pi;
  MetricsReport rep;
  rep.skip = skip;
  rep.dof = table.meta.dof;
  rep.diverged = table.meta.diverged;
  const Mat3& r_sf = table.meta.f_frame;

  Vec3 pos_sq = Vec3::Zero();
  Vec3 pos_max = Vec3::Zero();
  Vec3 att_sq = Vec3::Zero();
  Vec3 att_max = Vec3::Zero();
  long saturated = 0;
  for (const auto& row : table.rows) {
    if (!(row.t >= skip)) continue;
    ++rep.samples;
    const Vec3 e = (row.position - row.position_d).cwiseAbs();
    pos_max = pos_max.cwiseMax(e);
    pos_sq += e.cwiseAbs2();

    const Mat3 r_f = row.attitude.toRotationMatrix() * r_sf;
    // Below 6 DOF no desired roll is logged; compare against the actual one.
    const double roll = rep.dof == 6 ? 0.0 : euler_zyx(r_f).roll;
    const Mat3 r_d = from_euler_zyx({roll, row.pitch_d, row.yaw_d});
    const Mat3 rel = r_d.transpose() * r_f;
    const Vec3 a = so3_log(rel).cwiseAbs() * kToDeg;
    att_max = att_max.cwiseMax(a);
    att_sq += a.cwiseAbs2();
    rep.attitude_angle_max = std::max(rep.attitude_angle_max, so3_log(rel).norm() * kToDeg);
    saturated += row.saturated;
  }
  if (rep.samples == 0) {
    std::ostringstream msg;
    msg << "no samples at or after t = " << skip << " s";
    throw Error(ErrorCode::kMalformedTelemetry, msg.str());
  }
  const double n = rep.samples;
  for (int i = 0; i < 3; ++i) {
    rep.position_max[i] = pos_max(i);
    rep.position_rms[i] = std::sqrt(pos_sq(i) / n);
    if (i == 0 && rep.dof < 6) continue;
    rep.attitude_max[i] = att_max(i);
    rep.attitude_rms[i] = std::sqrt(att_sq(i) / n);
  }
  if (table.rotors > 0) rep.saturation_fraction = static_cast<double>(saturated) / (n * table.rotors);
  return rep;
}

namespace {

nlohmann::json axes(const std::array<double, 3>& v) {
  return {{"x", v[0]}, {"y", v[1]}, {"z", v[2]}};
}

nlohmann::json axes(const std::array<std::optional<double>, 3>& v) {
  nlohmann::json j;
  const char* names[] = {"roll", "pitch", "yaw"};
  for (int i = 0; i < 3; ++i) j[names[i]] = v[i] ? nlohmann::json(*v[i]) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

std::string to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["samples"] = r.samples;
  j["skip_s"] = r.skip;
  j["dof"] = r.dof;
  j["position_max_m"] = axes(r.position_max);
  j["position_rms_m"] = axes(r.position_rms);
  j["attitude_max_deg"] = axes(r.attitude_max);
  j["attitude_rms_deg"] = axes(r.attitude_rms);
  j["attitude_angle_max_deg"] = r.attitude_angle_max;
  j["saturation_fraction"] = r.saturation_fraction;
  j["diverged"] = r.diverged;
  return j.dump(2) + "\n";
}

std::string to_text(const MetricsReport& r) {
  std::ostringstream o;
  char buf[160];
  o << "samples " << r.samples << " (t >= " << r.skip << " s), dof " << r.dof << "\n";
  std::snprintf(buf, sizeof buf, "position max [m]   x %.4f  y %.4f  z %.4f\n", r.position_max[0],
                r.position_max[1], r.position_max[2]);
  o << buf;
  std::snprintf(buf, sizeof buf, "position rms [m]   x %.4f  y %.4f  z %.4f\n", r.position_rms[0],
                r.position_rms[1], r.position_rms[2]);
  o << buf;
  const auto fmt = [](const std::optional<double>& v) {
    char b[32];
    if (!v) return std::string("   n/a");
    std::snprintf(b, sizeof b, "%6.3f", *v);
    return std::string(b);
  };
  o << "attitude max [deg] roll " << fmt(r.attitude_max[0]) << "  pitch " << fmt(r.attitude_max[1])
    << "  yaw " << fmt(r.attitude_max[2]) << "\n";
  o << "attitude rms [deg] roll " << fmt(r.attitude_rms[0]) << "  pitch " << fmt(r.attitude_rms[1])
    << "  yaw " << fmt(r.attitude_rms[2]) << "\n";
  std::snprintf(buf, sizeof buf, "saturation %.4f%s\n", r.saturation_fraction,
                r.diverged ? "  DIVERGED" : "");
  o << buf;
  return o.str();
}

}  // namespace modquad
