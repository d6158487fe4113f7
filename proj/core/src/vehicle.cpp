#include "modquad/vehicle.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "modquad/error.hpp"

namespace modquad {

const char* to_string(ModuleKind kind) noexcept {
  switch (kind) {
    case ModuleKind::kR: return "R";
    case ModuleKind::kT: return "T";
    case ModuleKind::kCustom: return "custom";
  }
  return "?";
}

void validate(const ModuleParams& p) {
  const bool ok = p.mass_kg > 0.0 && p.arm_half_m > 0.0 && p.k_f > 0.0 && p.k_m >= 0.0 &&
                  (p.body_dims_m.array() > 0.0).all() && std::isfinite(p.mass_kg) &&
                  std::isfinite(p.arm_half_m) && std::isfinite(p.k_f) && std::isfinite(p.k_m) &&
                  p.body_dims_m.allFinite();
  if (!ok) {
    std::ostringstream msg;
    msg << "module parameters out of range (mass " << p.mass_kg << " kg, a " << p.arm_half_m
        << " m, k_f " << p.k_f << ", k_m " << p.k_m << ", dims " << p.body_dims_m.transpose()
        << ")";
    throw Error(ErrorCode::kInvalidParams, msg.str());
  }
}

Mat3 ModuleSpec::inertia() const {
  const Vec3 d = params.body_dims_m.cwiseAbs2();
  const double k = params.mass_kg / 12.0;
  return Vec3(k * (d.y() + d.z()), k * (d.x() + d.z()), k * (d.x() + d.y())).asDiagonal();
}

std::array<Vec3, 4> square_layout(double a) {
  return {Vec3(a, a, 0.0), Vec3(a, -a, 0.0), Vec3(-a, -a, 0.0), Vec3(-a, a, 0.0)};
}

namespace {

ModuleSpec build(ModuleKind kind, const std::array<Mat3, 4>& orientations,
                 const ModuleParams& params) {
  validate(params);
  const auto positions = square_layout(params.arm_half_m);
  ModuleSpec m;
  m.kind = kind;
  m.params = params;
  for (std::size_t j = 0; j < 4; ++j) {
    if (!is_rotation(orientations[j])) {
      throw Error(ErrorCode::kInvalidParams, "rotor orientation is not a rotation matrix");
    }
    m.propellers[j] = PropellerSpec{positions[j], orientations[j], kSpinSigns[j]};
  }
  return m;
}

}  // namespace

ModuleSpec make_r_module(const Mat3& r_star, const ModuleParams& params) {
  return build(ModuleKind::kR, {r_star, r_star, r_star, r_star}, params);
}

ModuleSpec make_t_module(double eta, const ModuleParams& params) {
  if (!(std::abs(eta) < std::numbers::pi / 2.0)) {
    std::ostringstream msg;
    msg << "T-module tilt " << eta << " rad must satisfy |eta| < pi/2";
    throw Error(ErrorCode::kInvalidParams, msg.str());
  }
  const auto positions = square_layout(1.0);
  std::array<Mat3, 4> orientations;
  for (std::size_t j = 0; j < 4; ++j) {
    // eta_1 = eta_3 = eta, eta_2 = eta_4 = -eta
    const double eta_j = (j % 2 == 0) ? eta : -eta;
    orientations[j] = rodrigues(positions[j].normalized(), eta_j);
  }
  return build(ModuleKind::kT, orientations, params);
}

ModuleSpec make_custom_module(const std::array<Mat3, 4>& orientations,
                              const ModuleParams& params) {
  return build(ModuleKind::kCustom, orientations, params);
}

TorqueBalanceReport check_torque_balance(const ModuleSpec& module, double tol) {
  TorqueBalanceReport report;
  Vec3 thrust_sum = Vec3::Zero();
  for (const auto& prop : module.propellers) {
    const Vec3 f = prop.orientation * Vec3::UnitZ();
    thrust_sum += f;
    report.thrust_torque += prop.position.cross(f);
    report.drag_balance += prop.spin_sign * f;
  }
  report.residual_torque =
      report.thrust_torque + module.params.drag_ratio() * report.drag_balance;
  report.lambda = thrust_sum.norm();
  if (report.lambda > 1e-12) {
    report.thrust_direction = thrust_sum / report.lambda;
  } else {
    report.lambda = 0.0;
    report.thrust_direction = Vec3::UnitZ();
  }
  report.balanced = report.thrust_torque.norm() < tol && report.drag_balance.norm() < tol &&
                    report.lambda > 0.0;
  return report;
}

ModuleDesignMatrix module_design_matrix(const ModuleSpec& module) {
  ModuleDesignMatrix a;
  const double ratio = module.params.drag_ratio();
  for (int j = 0; j < 4; ++j) {
    const auto& prop = module.propellers[static_cast<std::size_t>(j)];
    const Vec3 f = prop.orientation * Vec3::UnitZ();
    a.col(j).head<3>() = f;
    a.col(j).tail<3>() = prop.position.cross(f) + prop.spin_sign * ratio * f;
  }
  return a;
}

Mat3 StructureModel::rotor_orientation(int i, int j) const {
  const auto& pm = modules.at(static_cast<std::size_t>(i));
  return pm.rotation * pm.module.propellers.at(static_cast<std::size_t>(j)).orientation;
}

Vec3 StructureModel::rotor_position(int i, int j) const {
  const auto& pm = modules.at(static_cast<std::size_t>(i));
  return pm.offset + pm.rotation * pm.module.propellers.at(static_cast<std::size_t>(j)).position;
}

StructureModel assemble_structure(std::span<const ModulePlacement> placements) {
  if (placements.empty()) {
    throw Error(ErrorCode::kEmptyStructure, "a structure needs at least one module");
  }
  std::set<GridCell> occupied;
  for (const auto& p : placements) {
    validate(p.module.params);
    if (!is_rotation(p.rotation)) {
      throw Error(ErrorCode::kInvalidParams, "module placement rotation is not a rotation");
    }
    if (!occupied.insert(p.cell).second) {
      std::ostringstream msg;
      msg << "two modules occupy cell (" << p.cell[0] << ", " << p.cell[1] << ", " << p.cell[2]
          << ")";
      throw Error(ErrorCode::kOverlappingModules, msg.str());
    }
  }

  const Vec3 pitch = placements.front().module.params.body_dims_m;
  StructureModel s;
  Vec3 weighted = Vec3::Zero();
  for (const auto& p : placements) {
    const Vec3 centre(p.cell[0] * pitch.x(), p.cell[1] * pitch.y(), p.cell[2] * pitch.z());
    s.mass += p.module.params.mass_kg;
    weighted += p.module.params.mass_kg * centre;
    s.modules.push_back(PlacedModule{p.module, p.cell, p.rotation, centre});
  }
  s.com_in_grid = weighted / s.mass;
  for (auto& pm : s.modules) {
    pm.offset -= s.com_in_grid;
    const Vec3& d = pm.offset;
    const double m = pm.module.params.mass_kg;
    s.inertia += pm.rotation * pm.module.inertia() * pm.rotation.transpose() +
                 m * (d.squaredNorm() * Mat3::Identity() - d * d.transpose());
  }
  s.inertia = 0.5 * (s.inertia + s.inertia.transpose());
  s.design = design_matrix(s);
  return s;
}

DesignMatrix design_matrix(const StructureModel& s) {
  DesignMatrix a(6, s.rotor_count());
  for (int i = 0; i < static_cast<int>(s.modules.size()); ++i) {
    const auto& pm = s.modules[static_cast<std::size_t>(i)];
    const double ratio = pm.module.params.drag_ratio();
    for (int j = 0; j < 4; ++j) {
      const Vec3 f = s.rotor_orientation(i, j) * Vec3::UnitZ();
      const Vec3 p = s.rotor_position(i, j);
      const int spin = pm.module.propellers[static_cast<std::size_t>(j)].spin_sign;
      const int col = 4 * i + j;
      a.col(col).head<3>() = f;
      a.col(col).tail<3>() = p.cross(f) + spin * ratio * f;
    }
  }
  return a;
}

}  // namespace modquad
