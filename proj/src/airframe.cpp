#include "rotorsim/airframe.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rotorsim {

namespace {

bool finite(const Eigen::Vector3d& v) { return v.allFinite(); }

}  // namespace

void validate(const RotorSpec& spec) {
  if (!finite(spec.position)) {
    throw std::invalid_argument("rotor position must be finite");
  }
  if (!finite(spec.axis) || std::abs(spec.axis.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("rotor axis must be unit length");
  }
  if (spec.spin_direction != 1 && spec.spin_direction != -1) {
    throw std::invalid_argument("spin_direction must be +1 or -1");
  }
  if (!(spec.thrust_coefficient > 0.0)) {
    throw std::invalid_argument("thrust_coefficient must be > 0");
  }
  if (!(spec.torque_to_thrust_ratio >= 0.0)) {
    throw std::invalid_argument("torque_to_thrust_ratio must be >= 0");
  }
  if (!(spec.thrust_max > spec.thrust_min)) {
    throw std::invalid_argument("thrust_max must exceed thrust_min");
  }
  if (!std::isfinite(spec.thrust_min) || !std::isfinite(spec.thrust_max)) {
    throw std::invalid_argument("thrust bounds must be finite");
  }
}

void validate(const AirframeModel& model) {
  if (model.rotors.empty()) {
    throw std::invalid_argument("model needs at least one rotor");
  }
  for (const RotorSpec& rotor : model.rotors) {
    validate(rotor);
  }
  if (!(model.mass > 0.0) || !std::isfinite(model.mass)) {
    throw std::invalid_argument("mass must be positive");
  }
  if (!model.inertia.allFinite() ||
      (model.inertia - model.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("inertia must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(model.inertia);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("inertia must be positive definite");
  }
  if (!finite(model.end_effector_offset)) {
    throw std::invalid_argument("end_effector_offset must be finite");
  }
  if (!(model.linear_drag_coefficient >= 0.0)) {
    throw std::invalid_argument("linear_drag_coefficient must be >= 0");
  }
}

EffectivenessMatrix effectiveness_matrix(const AirframeModel& model) {
  const int n = model.rotor_count();
  EffectivenessMatrix matrix(6, n);
  for (int i = 0; i < n; ++i) {
    const RotorSpec& rotor = model.rotors[i];
    matrix.col(i).head<3>() = rotor.axis;
    matrix.col(i).tail<3>() =
        rotor.position.cross(rotor.axis) +
        rotor.spin_direction * rotor.torque_to_thrust_ratio * rotor.axis;
  }
  return matrix;
}

int actuation_rank(const AirframeModel& model) {
  const EffectivenessMatrix matrix = effectiveness_matrix(model);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix);
  const Eigen::VectorXd& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0) {
    return 0;
  }
  const double threshold = 1e-9 * sigma(0);
  int rank = 0;
  for (int i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > threshold) {
      ++rank;
    }
  }
  return rank;
}

double thrust_from_speed(const RotorSpec& spec, double speed_rad_s) {
  if (speed_rad_s < 0.0) {
    throw std::domain_error("rotor speed must be >= 0");
  }
  return spec.thrust_coefficient * speed_rad_s * speed_rad_s;
}

RotorSpeed speed_from_thrust(const RotorSpec& spec, double thrust_n) {
  if (thrust_n < spec.thrust_min || thrust_n > spec.thrust_max) {
    throw std::domain_error("thrust outside rotor bounds");
  }
  RotorSpeed out;
  out.sign = thrust_n < 0.0 ? -1 : 1;
  out.speed_rad_s = std::sqrt(std::abs(thrust_n) / spec.thrust_coefficient);
  return out;
}

namespace {

// Rotation of the +z thrust axis about an arm direction; used by the tilted
// presets. Positive angle follows the right-hand rule about the arm.
Eigen::Vector3d tilted_axis(const Eigen::Vector3d& arm_direction, double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, arm_direction.normalized()) *
         Eigen::Vector3d::UnitZ();
}

AirframeModel make_quad_flat() {
  AirframeModel model;
  model.mass = 1.2;
  model.inertia = Eigen::Vector3d(0.015, 0.015, 0.025).asDiagonal();
  model.linear_drag_coefficient = 0.1;

  const double arm = 0.25;
  const Eigen::Vector3d arms[4] = {
      {arm, 0.0, 0.0}, {0.0, arm, 0.0}, {-arm, 0.0, 0.0}, {0.0, -arm, 0.0}};
  for (int i = 0; i < 4; ++i) {
    RotorSpec rotor;
    rotor.position = arms[i];
    rotor.axis = Eigen::Vector3d::UnitZ();
    rotor.spin_direction = (i % 2 == 0) ? 1 : -1;
    rotor.thrust_coefficient = 1.0e-5;
    rotor.torque_to_thrust_ratio = 0.05;
    rotor.thrust_min = 0.0;
    rotor.thrust_max = 8.0;
    model.rotors.push_back(rotor);
  }
  return model;
}

AirframeModel make_hex_tilt20() {
  AirframeModel model;
  model.mass = 2.0;
  model.inertia = Eigen::Vector3d(0.08, 0.08, 0.14).asDiagonal();
  model.end_effector_offset = {0.3, 0.0, 0.0};
  model.linear_drag_coefficient = 0.1;

  const double arm = 0.4;
  const double tilt = 20.0 * std::numbers::pi / 180.0;
  for (int i = 0; i < 6; ++i) {
    const double angle = i * std::numbers::pi / 3.0;
    const Eigen::Vector3d arm_dir(std::cos(angle), std::sin(angle), 0.0);
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;

    RotorSpec rotor;
    rotor.position = arm * arm_dir;
    rotor.axis = tilted_axis(arm_dir, sign * tilt);
    rotor.spin_direction = (i % 2 == 0) ? 1 : -1;
    rotor.thrust_coefficient = 1.2e-5;
    rotor.torque_to_thrust_ratio = 0.05;
    rotor.thrust_min = 0.0;
    rotor.thrust_max = 12.0;
    model.rotors.push_back(rotor);
  }
  return model;
}

AirframeModel make_octo_fa() {
  AirframeModel model;
  model.mass = 2.5;
  model.inertia = Eigen::Vector3d(0.09, 0.09, 0.16).asDiagonal();
  model.linear_drag_coefficient = 0.1;

  const double arm = 0.35;
  const double tilt = 25.0 * std::numbers::pi / 180.0;
  for (int i = 0; i < 8; ++i) {
    const double angle = i * std::numbers::pi / 4.0;
    const Eigen::Vector3d arm_dir(std::cos(angle), std::sin(angle), 0.0);
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;

    RotorSpec rotor;
    rotor.position = arm * arm_dir;
    rotor.axis = tilted_axis(arm_dir, sign * tilt);
    rotor.spin_direction = (i % 2 == 0) ? 1 : -1;
    rotor.thrust_coefficient = 1.0e-5;
    rotor.torque_to_thrust_ratio = 0.05;
    rotor.thrust_min = 0.0;
    rotor.thrust_max = 10.0;
    model.rotors.push_back(rotor);
  }
  return model;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"quad-flat", "hex-tilt20", "octo-fa"};
  return names;
}

bool is_preset_name(const std::string& name) {
  for (const std::string& preset : preset_names()) {
    if (preset == name) {
      return true;
    }
  }
  return false;
}

AirframeModel make_preset(const std::string& name) {
  AirframeModel model;
  if (name == "quad-flat") {
    model = make_quad_flat();
  } else if (name == "hex-tilt20") {
    model = make_hex_tilt20();
  } else if (name == "octo-fa") {
    model = make_octo_fa();
  } else {
    throw std::invalid_argument("unknown preset \"" + name +
                                "\" (expected quad-flat, hex-tilt20 or octo-fa)");
  }
  validate(model);
  return model;
}

}  // namespace rotorsim
