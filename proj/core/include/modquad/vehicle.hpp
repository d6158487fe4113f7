#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "modquad/geometry.hpp"

namespace modquad {

using DesignMatrix = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using ModuleDesignMatrix = Eigen::Matrix<double, 6, 4>;

enum class ModuleKind { kR, kT, kCustom };

const char* to_string(ModuleKind kind) noexcept;

/// Physical constants of one module. Thrust inputs are in newtons, so k_f is
/// absorbed into the input and only the drag ratio k_m / k_f (metres) enters
/// the design matrix.
struct ModuleParams {
  double mass_kg = 0.135;
  double arm_half_m = 0.07;
  Vec3 body_dims_m{0.2, 0.2, 0.05};
  double k_f = 1.0;
  double k_m = 0.016;

  double drag_ratio() const { return k_m / k_f; }
  bool operator==(const ModuleParams&) const = default;
};

/// Throws InvalidParams unless mass, a, k_f, dims are positive and k_m >= 0.
void validate(const ModuleParams& params);

struct PropellerSpec {
  Vec3 position;     // module frame, z == 0
  Mat3 orientation;  // propeller frame in the module frame
  int spin_sign = 1;
};

struct ModuleSpec {
  ModuleKind kind = ModuleKind::kCustom;
  std::array<PropellerSpec, 4> propellers;
  ModuleParams params;

  /// Solid cuboid inertia about the module centre, module frame.
  Mat3 inertia() const;
};

/// Square layout p1=(a,a,0), p2=(a,-a,0), p3=(-a,-a,0), p4=(-a,a,0).
std::array<Vec3, 4> square_layout(double arm_half);

inline constexpr std::array<int, 4> kSpinSigns{+1, -1, +1, -1};

/// All four rotors share the orientation r_star.
ModuleSpec make_r_module(const Mat3& r_star, const ModuleParams& params = {});

/// Rotor j tilted by eta_j about its own arm, eta_1 = eta_3 = -eta_2 = -eta_4 = eta.
/// Requires |eta| < pi/2.
ModuleSpec make_t_module(double eta, const ModuleParams& params = {});

/// Arbitrary per-rotor orientations on the standard square layout.
ModuleSpec make_custom_module(const std::array<Mat3, 4>& orientations,
                              const ModuleParams& params = {});

struct TorqueBalanceReport {
  bool balanced = false;
  Vec3 residual_torque = Vec3::Zero();  // thrust + drag torque at u = 1, N*m
  Vec3 thrust_torque = Vec3::Zero();    // sum p_j x R_j e3
  Vec3 drag_balance = Vec3::Zero();     // sum s_j R_j e3 (dimensionless)
  double lambda = 0.0;
  Vec3 thrust_direction = Vec3::UnitZ();
};

/// Evaluates the thrust-torque and drag-torque sums independently at u = 1.
TorqueBalanceReport check_torque_balance(const ModuleSpec& module, double tol = 1e-9);

/// 6x4 map from the module's rotor thrusts to its wrench about the module centre.
ModuleDesignMatrix module_design_matrix(const ModuleSpec& module);

using GridCell = std::array<int, 3>;

struct ModulePlacement {
  ModuleSpec module;
  GridCell cell{0, 0, 0};
  Mat3 rotation = Mat3::Identity();  // module frame in the structure frame
};

struct PlacedModule {
  ModuleSpec module;
  GridCell cell{0, 0, 0};
  Mat3 rotation = Mat3::Identity();
  Vec3 offset = Vec3::Zero();  // module centre relative to the structure CoM
};

/// A rigid assembly of modules. The structure frame sits at the CoM.
struct StructureModel {
  std::vector<PlacedModule> modules;
  double mass = 0.0;
  Mat3 inertia = Mat3::Zero();
  Vec3 com_in_grid = Vec3::Zero();  // CoM in the frame of grid cell (0,0,0)
  DesignMatrix design;

  int rotor_count() const { return static_cast<int>(modules.size()) * 4; }
  /// Rotor j of module i expressed in the structure frame.
  Mat3 rotor_orientation(int module_index, int rotor_index) const;
  Vec3 rotor_position(int module_index, int rotor_index) const;
};

/// Modules dock face to face; the grid pitch is the first module's body dims.
/// Throws EmptyStructure, OverlappingModules or InvalidParams.
StructureModel assemble_structure(std::span<const ModulePlacement> placements);

/// Column (i, j) = [R_ij e3 ; p_ij x R_ij e3 + s_j (k_m/k_f) R_ij e3].
DesignMatrix design_matrix(const StructureModel& structure);

}  // namespace modquad
