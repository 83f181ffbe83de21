#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace rotorsim {

inline constexpr double kGravity = 9.80665;  // m/s^2

/// World-frame gravity acceleration, East-North-Up convention.
inline Eigen::Vector3d gravity_vec() { return {0.0, 0.0, -kGravity}; }

/// One rotor: geometry in the body frame (x forward, y left, z up) plus
/// its aerodynamic constants and thrust envelope. Bidirectional rotors
/// have thrust_min < 0.
struct RotorSpec {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // hub location [m]
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();      // thrust direction, unit
  int spin_direction = 1;                               // +1 CCW about axis, -1 CW
  double thrust_coefficient = 1.0e-5;                   // N s^2 / rad^2
  double torque_to_thrust_ratio = 0.05;                 // m, drag torque per N
  double thrust_min = 0.0;                              // N
  double thrust_max = 10.0;                             // N
};

struct AirframeModel {
  std::vector<RotorSpec> rotors;
  double mass = 1.0;                                          // kg
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Identity();      // kg m^2, body frame
  Eigen::Vector3d end_effector_offset = Eigen::Vector3d::Zero();  // m, body frame
  double linear_drag_coefficient = 0.0;                       // N s / m

  int rotor_count() const { return static_cast<int>(rotors.size()); }
};

/// Paired force/moment, the common currency between control, allocation
/// and analysis. Frame depends on context and is documented per use.
struct Wrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();   // N
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();  // N m

  static Wrench zero() { return {}; }
};

/// Throw std::invalid_argument if the spec violates its invariants.
void validate(const RotorSpec& spec);
void validate(const AirframeModel& model);

using EffectivenessMatrix = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// 6 x n map from per-rotor thrusts [N] to body wrench. Column i is
/// [a_i ; r_i x a_i + sigma_i * c_i * a_i]: thrust along the rotor axis,
/// thrust moment about the center of mass, and drag torque along the
/// axis signed by the spin direction (+1 adds torque along +axis).
EffectivenessMatrix effectiveness_matrix(const AirframeModel& model);

/// Numerical rank of the effectiveness matrix with singular values below
/// 1e-9 * sigma_max treated as zero. Rank 6 means fully actuated.
int actuation_rank(const AirframeModel& model);

inline bool is_fully_actuated(const AirframeModel& model) {
  return actuation_rank(model) == 6;
}

/// thrust = k_f * speed^2, speed >= 0.
double thrust_from_speed(const RotorSpec& spec, double speed_rad_s);

/// Inverse of thrust_from_speed. Speed is always reported nonnegative;
/// sign carries the thrust direction for bidirectional rotors.
struct RotorSpeed {
  double speed_rad_s = 0.0;
  int sign = 1;
};

/// Throws std::domain_error when thrust lies outside [thrust_min, thrust_max].
RotorSpeed speed_from_thrust(const RotorSpec& spec, double thrust_n);

/// Built-in airframes: "quad-flat", "hex-tilt20", "octo-fa".
AirframeModel make_preset(const std::string& name);
const std::vector<std::string>& preset_names();
bool is_preset_name(const std::string& name);

}  // namespace rotorsim
