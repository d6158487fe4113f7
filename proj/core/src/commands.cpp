#include "modquad/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "modquad/metrics.hpp"
#include "modquad/simulation.hpp"
#include "modquad/telemetry_io.hpp"

namespace modquad {

namespace {

constexpr double kToDeg = 180.0 / std::numbers::pi;

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

std::string matrix_text(const Eigen::MatrixXd& m, const std::string& indent) {
  std::ostringstream o;
  char buf[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    o << indent << "[";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%s%9.5f", c ? " " : "", m(r, c) == 0.0 ? 0.0 : m(r, c));
      o << buf;
    }
    o << " ]\n";
  }
  return o.str();
}

void report_error(std::ostream& err, const std::string& what, const Error& e) {
  err << "error: " << what << ": " << e.what() << "\n";
  spdlog::debug("{} failed with {}", what, to_string(e.code()));
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kSchemaError:
    case ErrorCode::kUnknownKey:
    case ErrorCode::kInvalidParams:
    case ErrorCode::kEmptyStructure:
    case ErrorCode::kOverlappingModules:
    case ErrorCode::kMalformedTelemetry:
      return kExitSchema;
    case ErrorCode::kInapplicableDesign:
    case ErrorCode::kDegenerateStructure:
    case ErrorCode::kInvalidDof:
      return kExitInapplicable;
    case ErrorCode::kNonFiniteState:
      return kExitDiverged;
    default:
      return kExitFailure;
  }
}

void configure_logging(const char* level) {
  auto logger = spdlog::get("modquad");
  if (!logger) {
    logger = spdlog::stderr_color_mt("modquad");
    spdlog::set_default_logger(logger);
  }
  spdlog::set_level(spdlog::level::warn);
  if (level && *level) {
    const auto lvl = spdlog::level::from_str(level);
    // from_str maps unknown names to off; only accept "off" when asked for.
    if (lvl != spdlog::level::off || std::string(level) == "off") spdlog::set_level(lvl);
  }
}

std::string analysis_json(const StructureConfig& config, const StructureModel& structure,
                          const ActuationAnalysis& a) {
  nlohmann::ordered_json j;
  j["name"] = config.name;
  j["modules"] = structure.modules.size();
  j["mass_kg"] = structure.mass;
  j["inertia_kg_m2"] = matrix_json(structure.inertia);
  nlohmann::json balance = nlohmann::json::array();
  for (const auto& pm : structure.modules) {
    const auto tb = check_torque_balance(pm.module);
    balance.push_back({{"kind", to_string(pm.module.kind)},
                       {"cell", pm.cell},
                       {"balanced", tb.balanced},
                       {"lambda", tb.lambda},
                       {"thrust_direction", vec_json(tb.thrust_direction)},
                       {"residual_torque_nm", vec_json(tb.residual_torque)}});
  }
  j["torque_balance"] = balance;
  j["rank_A"] = a.rank_a;
  j["rank_Af"] = a.rank_af;
  j["rank_Atau"] = a.rank_atau;
  j["k"] = a.dependent_rows;
  j["dof"] = a.controllable_dof;
  j["singular_values"] = vec_json(a.raw_singular_values);
  j["singular_values_normalized"] = vec_json(a.singular_values);
  nlohmann::json axes = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) {
    axes.push_back({{"sigma", a.raw_singular_values(i)},
                    {"direction", vec_json(Vec3(a.singular_vectors.col(i)))}});
  }
  j["ellipsoid_semi_axes"] = axes;
  j["f_frame"] = matrix_json(a.f_frame);
  j["f_frame_tie"] = a.axes_tied;
  j["dimensioning"] = matrix_json(a.dimensioning);
  j["applicable"] = a.applicable;
  j["obtuse_pair"] = a.obtuse_pair;
  j["max_pair_angle_deg"] = a.max_pair_angle * kToDeg;
  j["f_max_n"] = config.f_max;
  j["hover_residual_n"] = a.hover_residual;
  j["hover_thrust_max_n"] = a.hover_thrust.size() ? a.hover_thrust.maxCoeff() : 0.0;
  j["notes"] = a.notes;
  return j.dump(2) + "\n";
}

std::string analysis_text(const StructureConfig& config, const StructureModel& structure,
                          const ActuationAnalysis& a) {
  std::ostringstream o;
  char buf[200];
  if (!config.name.empty()) o << config.name << "\n";
  std::snprintf(buf, sizeof buf, "modules %zu, rotors %d, mass %.4f kg\n", structure.modules.size(),
                structure.rotor_count(), structure.mass);
  o << buf;
  o << "torque balance:\n";
  for (std::size_t i = 0; i < structure.modules.size(); ++i) {
    const auto& pm = structure.modules[i];
    const auto tb = check_torque_balance(pm.module);
    std::snprintf(buf, sizeof buf,
                  "  M%-3zu %-6s cell (%d,%d,%d)  %s  lambda %.6f  f* (%.4f, %.4f, %.4f)\n", i + 1,
                  to_string(pm.module.kind), pm.cell[0], pm.cell[1], pm.cell[2],
                  tb.balanced ? "balanced  " : "UNBALANCED", tb.lambda, tb.thrust_direction.x(),
                  tb.thrust_direction.y(), tb.thrust_direction.z());
    o << buf;
  }
  std::snprintf(buf, sizeof buf, "rank A %d, rank A_f %d, rank A_tau %d, k %d, DOF %d\n", a.rank_a,
                a.rank_af, a.rank_atau, a.dependent_rows, a.controllable_dof);
  o << buf;
  o << "actuation ellipsoid (sigma, direction):\n";
  for (int i = 0; i < 3; ++i) {
    std::snprintf(buf, sizeof buf, "  %.6f (normalized %.6f)  (%.5f, %.5f, %.5f)\n",
                  a.raw_singular_values(i), a.singular_values(i), a.singular_vectors(0, i),
                  a.singular_vectors(1, i), a.singular_vectors(2, i));
    o << buf;
  }
  o << "S_R_F:" << (a.axes_tied ? " (tied singular values, minimal rotation chosen)" : "") << "\n"
    << matrix_text(a.f_frame, "  ");
  o << "D:\n" << matrix_text(a.dimensioning, "  ");
  std::snprintf(buf, sizeof buf,
                "applicable: %s (widest rotor pair %.2f deg, hover residual %.3g N at f_max %.4g N)\n",
                a.applicable ? "yes" : "NO", a.max_pair_angle * kToDeg, a.hover_residual, config.f_max);
  o << buf;
  for (const auto& n : a.notes) o << "note: " << n << "\n";
  return o.str();
}

int cmd_analyze(const std::string& path, Format format, std::ostream& out, std::ostream& err) {
  try {
    const StructureConfig config = load_config(path);
    const StructureModel structure = build_structure(config);
    const ActuationAnalysis a = analyze_structure(structure, config.f_max);
    out << (format == Format::kJson ? analysis_json(config, structure, a)
                                    : analysis_text(config, structure, a));
    if (!a.applicable) {
      err << "error: " << path << ": InapplicableDesign: the structure cannot hover along z_F "
          << "with thrusts in [0, f_max]";
      for (const auto& n : a.notes) err << "; " << n;
      err << "\n";
      return kExitInapplicable;
    }
    return kExitOk;
  } catch (const Error& e) {
    report_error(err, path, e);
    return exit_code_for(e.code());
  }
}

namespace {

struct JobResult {
  int code = kExitOk;
  std::string out;
  std::string err;
};

JobResult run_job(const SimulateJob& job, Format format) {
  JobResult r;
  std::ostringstream out;
  std::ostringstream err;
  try {
    const StructureConfig config = load_config(job.config_path);
    if (!config.scenario) throw Error(ErrorCode::kSchemaError, "missing 'scenario' block");
    const StructureModel structure = build_structure(config);
    const ActuationAnalysis a = analyze_structure(structure, config.f_max);
    if (!a.applicable) {
      throw Error(ErrorCode::kInapplicableDesign, "the structure cannot hover with thrusts in [0, f_max]");
    }
    const Trajectory trajectory(config.scenario->trajectory);
    spdlog::info("{}: simulating {} s, DOF {}", job.config_path, config.scenario->duration,
                 a.controllable_dof);
    const Telemetry tel =
        run_scenario(structure, a, config.gains, trajectory, scenario_options(config));
    save_telemetry(job.output_path, tel);
    if (format == Format::kJson) {
      nlohmann::ordered_json j;
      j["config"] = job.config_path;
      j["output"] = job.output_path;
      j["samples"] = tel.samples.size();
      j["diverged"] = tel.diverged;
      if (tel.diverged) j["failure"] = tel.failure;
      out << j.dump() << "\n";
    } else {
      out << job.config_path << " -> " << job.output_path << " (" << tel.samples.size()
          << " samples" << (tel.diverged ? ", DIVERGED" : "") << ")\n";
    }
    tel.throw_if_diverged();
  } catch (const Error& e) {
    report_error(err, job.config_path, e);
    r.code = exit_code_for(e.code());
  }
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

int cmd_simulate(const std::vector<SimulateJob>& jobs, int jobs_in_parallel, Format format,
                 std::ostream& out, std::ostream& err) {
  std::vector<JobResult> results(jobs.size());
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs_in_parallel, 1)), 1,
                              std::max<std::size_t>(jobs.size(), 1));
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) results[i] = run_job(jobs[i], format);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  int code = kExitOk;
  for (const auto& r : results) {
    out << r.out;
    err << r.err;
    code = std::max(code, r.code);
  }
  return code;
}

int cmd_metrics(const std::string& path, double skip, Format format, std::ostream& out,
                std::ostream& err) {
  try {
    const TelemetryTable table = load_telemetry(path);
    const bool window_empty = std::none_of(table.rows.begin(), table.rows.end(),
                                           [&](const TelemetryRow& r) { return r.t >= skip; });
    if (table.meta.diverged && window_empty) {
      err << "error: " << path << ": run diverged before t = " << skip << " s\n";
      return kExitDiverged;
    }
    const MetricsReport rep = compute_metrics(table, skip);
    out << (format == Format::kJson ? to_json(rep) : to_text(rep));
    return rep.diverged ? kExitDiverged : kExitOk;
  } catch (const Error& e) {
    report_error(err, path, e);
    return exit_code_for(e.code());
  }
}

}  // namespace modquad
