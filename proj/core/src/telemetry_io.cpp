#include "modquad/telemetry_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "modquad/error.hpp"

namespace modquad {

namespace {

constexpr int kFixedColumns = 19;

void put(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  if (!line.empty()) line += ',';
  line += buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorCode::kMalformedTelemetry, "line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

std::string telemetry_header(int rotors) {
  std::string h = kTelemetryColumns;
  for (int i = 1; i <= rotors; ++i) h += ",u" + std::to_string(i);
  return h + ",sat";
}

void write_telemetry_csv(std::ostream& out, const Telemetry& tel) {
  const int rotors = tel.samples.empty() ? tel.rotors : static_cast<int>(tel.samples.front().u_cmd.size());
  out << telemetry_header(rotors) << '\n';
  std::string line;
  for (const auto& s : tel.samples) {
    line.clear();
    Eigen::Quaterniond q(s.state.attitude);
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    q.normalize();
    const EulerZYX d = euler_zyx(s.attitude_d);
    put(line, s.t);
    for (int i = 0; i < 3; ++i) put(line, s.state.position(i));
    for (int i = 0; i < 3; ++i) put(line, s.state.velocity(i));
    put(line, q.w());
    put(line, q.x());
    put(line, q.y());
    put(line, q.z());
    for (int i = 0; i < 3; ++i) put(line, s.state.angular_velocity(i));
    for (int i = 0; i < 3; ++i) put(line, s.position_d(i));
    put(line, d.yaw);
    put(line, d.pitch);
    for (Eigen::Index i = 0; i < s.u_cmd.size(); ++i) put(line, s.u_cmd(i));
    line += ',' + std::to_string(s.saturated);
    out << line << '\n';
  }
}

std::string telemetry_meta_json(const Telemetry& tel) {
  nlohmann::ordered_json j;
  j["dof"] = tel.dof;
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 3; ++r) {
    rows.push_back({tel.f_frame(r, 0), tel.f_frame(r, 1), tel.f_frame(r, 2)});
  }
  j["f_frame"] = rows;
  j["f_max_n"] = tel.f_max;
  j["rotors"] = tel.samples.empty() ? tel.rotors : static_cast<int>(tel.samples.front().u_cmd.size());
  j["diverged"] = tel.diverged;
  j["failure"] = tel.failure;
  return j.dump(2) + "\n";
}

void save_telemetry(const std::string& path, const Telemetry& tel) {
  std::ofstream csv(path, std::ios::binary);
  if (!csv) throw Error(ErrorCode::kIo, "cannot write " + path);
  write_telemetry_csv(csv, tel);
  std::ofstream meta(path + ".meta.json", std::ios::binary);
  if (!meta) throw Error(ErrorCode::kIo, "cannot write " + path + ".meta.json");
  meta << telemetry_meta_json(tel);
  if (!csv || !meta) throw Error(ErrorCode::kIo, "write failed for " + path);
}

TelemetryTable read_telemetry_csv(std::istream& in) {
  TelemetryTable table;
  std::string line;
  if (!std::getline(in, line)) malformed(1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  const auto fixed = split(kTelemetryColumns);
  if (header.size() < fixed.size() + 1 || header.back() != "sat" ||
      !std::equal(fixed.begin(), fixed.end(), header.begin())) {
    malformed(1, "unexpected header");
  }
  table.rotors = static_cast<int>(header.size() - fixed.size() - 1);
  for (int i = 0; i < table.rotors; ++i) {
    if (header[fixed.size() + static_cast<std::size_t>(i)] != "u" + std::to_string(i + 1)) {
      malformed(1, "thrust columns must be u1..uN");
    }
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      malformed(line_no, "expected " + std::to_string(header.size()) + " columns, got " +
                             std::to_string(cells.size()));
    }
    std::vector<double> v(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      char* end = nullptr;
      v[i] = std::strtod(cells[i].c_str(), &end);
      if (cells[i].empty() || end != cells[i].c_str() + cells[i].size()) {
        malformed(line_no, "not a number: '" + cells[i] + "'");
      }
    }
    TelemetryRow r;
    r.t = v[0];
    r.position = Vec3(v[1], v[2], v[3]);
    r.velocity = Vec3(v[4], v[5], v[6]);
    r.attitude = Eigen::Quaterniond(v[7], v[8], v[9], v[10]);
    if (std::abs(r.attitude.norm() - 1.0) > 1e-6) malformed(line_no, "quaternion is not unit");
    r.attitude.normalize();
    r.angular_velocity = Vec3(v[11], v[12], v[13]);
    r.position_d = Vec3(v[14], v[15], v[16]);
    r.yaw_d = v[17];
    r.pitch_d = v[18];
    r.u = Eigen::Map<const Eigen::VectorXd>(v.data() + kFixedColumns, table.rotors);
    r.saturated = static_cast<int>(v.back());
    table.rows.push_back(std::move(r));
  }
  return table;
}

TelemetryTable load_telemetry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  TelemetryTable table = read_telemetry_csv(in);

  std::ifstream meta(path + ".meta.json");
  if (meta) {
    try {
      const auto j = nlohmann::json::parse(meta);
      table.meta.dof = j.at("dof").get<int>();
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) table.meta.f_frame(r, c) = j.at("f_frame").at(r).at(c).get<double>();
      }
      table.meta.f_max = j.at("f_max_n").get<double>();
      table.meta.diverged = j.at("diverged").get<bool>();
      table.meta.present = true;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kMalformedTelemetry, path + ".meta.json: " + e.what());
    }
  }
  return table;
}

}  // namespace modquad
