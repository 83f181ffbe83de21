#include "rotorsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rotorsim {

void validate(const PidGains& gains) {
  if ((gains.kp.array() < 0.0).any() || (gains.ki.array() < 0.0).any() ||
      (gains.kd.array() < 0.0).any()) {
    throw std::invalid_argument("pid gains must be >= 0 componentwise");
  }
  if ((gains.integral_limit.array() <= 0.0).any() ||
      (gains.output_limit.array() <= 0.0).any()) {
    throw std::invalid_argument("pid limits must be > 0 componentwise");
  }
}

PidGains default_position_gains() {
  PidGains gains;
  gains.kp = Eigen::Vector3d::Constant(6.0);
  gains.ki = Eigen::Vector3d::Constant(1.0);
  gains.kd = Eigen::Vector3d::Constant(4.0);
  gains.integral_limit = Eigen::Vector3d::Constant(5.0);
  gains.output_limit = Eigen::Vector3d::Constant(20.0);
  return gains;
}

PidGains default_attitude_gains() {
  PidGains gains;
  gains.kp = Eigen::Vector3d::Constant(40.0);
  gains.ki = Eigen::Vector3d::Zero();
  gains.kd = Eigen::Vector3d::Constant(8.0);
  gains.integral_limit = Eigen::Vector3d::Constant(1.0);
  gains.output_limit = Eigen::Vector3d::Constant(20.0);
  return gains;
}

namespace {

Eigen::Vector3d clamp(const Eigen::Vector3d& v, const Eigen::Vector3d& limit) {
  return v.cwiseMax(-limit).cwiseMin(limit);
}

}  // namespace

Eigen::Vector3d VectorPid::step(const Eigen::Vector3d& error, const Eigen::Vector3d& rate,
                                double dt, PidTerms* terms) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("dt must be > 0");
  }
  integral_ = clamp(integral_ + error * dt, gains_.integral_limit);

  PidTerms t;
  t.p = gains_.kp.cwiseProduct(error);
  t.i = gains_.ki.cwiseProduct(integral_);
  t.d = -gains_.kd.cwiseProduct(rate);
  if (terms != nullptr) {
    *terms = t;
  }
  return clamp(t.p + t.i + t.d, gains_.output_limit);
}

Eigen::Vector3d PositionController::step(const RigidBodyState& state,
                                         const Eigen::Vector3d& setpoint, double dt,
                                         PidTerms* terms) {
  return pid_.step(setpoint - state.position, state.velocity, dt, terms);
}

ForceAttitudeSetpoint attitude_from_accel(const Eigen::Vector3d& a_des, double yaw_setpoint,
                                          const AirframeModel& model, bool fully_actuated,
                                          const Eigen::Quaterniond& attitude_setpoint,
                                          const Eigen::Quaterniond& current_attitude,
                                          const Eigen::Quaterniond& previous_desired) {
  ForceAttitudeSetpoint out;
  const Eigen::Vector3d specific_force = a_des - gravity_vec();  // per unit mass

  if (fully_actuated) {
    out.attitude = attitude_setpoint;
    out.body_force =
        current_attitude.toRotationMatrix().transpose() * (model.mass * specific_force);
    return out;
  }

  const double magnitude = specific_force.norm();
  if (magnitude < 1e-6) {
    out.attitude = previous_desired;
    out.body_force.setZero();
    out.degenerate = true;
    return out;
  }

  const Eigen::Vector3d z_body = specific_force / magnitude;
  const Eigen::Vector3d x_heading(std::cos(yaw_setpoint), std::sin(yaw_setpoint), 0.0);
  Eigen::Vector3d y_body = z_body.cross(x_heading);
  const double y_norm = y_body.norm();
  if (y_norm < 1e-9) {
    // Thrust direction parallel to the heading: keep the last commanded frame.
    out.attitude = previous_desired;
  } else {
    y_body /= y_norm;
    const Eigen::Vector3d x_body = y_body.cross(z_body);
    Eigen::Matrix3d rotation;
    rotation.col(0) = x_body;
    rotation.col(1) = y_body;
    rotation.col(2) = z_body;
    out.attitude = Eigen::Quaterniond(rotation);
  }
  out.body_force = Eigen::Vector3d(0.0, 0.0, model.mass * magnitude);
  return out;
}

Eigen::Vector3d attitude_error_vector(const Eigen::Quaterniond& desired,
                                      const Eigen::Quaterniond& current) {
  Eigen::Quaterniond error = desired * current.inverse();
  if (error.w() < 0.0) {
    error.coeffs() *= -1.0;  // short way around
  }
  const Eigen::Vector3d vec(error.x(), error.y(), error.z());
  const double vec_norm = vec.norm();
  if (vec_norm < 1e-12) {
    return Eigen::Vector3d::Zero();
  }
  const double angle = 2.0 * std::atan2(vec_norm, error.w());
  return angle * vec / vec_norm;
}

Eigen::Vector3d AttitudeController::step(const RigidBodyState& state,
                                         const Eigen::Quaterniond& desired, double dt,
                                         PidTerms* terms) {
  const Eigen::Vector3d error = attitude_error_vector(desired, state.attitude);
  const Eigen::Vector3d feedback =
      pid_.step(error, state.angular_velocity, dt, terms);
  const Eigen::Vector3d moment =
      inertia_ * feedback +
      state.angular_velocity.cross(inertia_ * state.angular_velocity);
  return clamp(moment, pid_.gains().output_limit);
}

Allocator::Allocator(const AirframeModel& model) : model_(model) {
  validate(model);
  matrix_ = effectiveness_matrix(model);
  rank_ = actuation_rank(model);

  // Reduced rows [Fz, Mx, My, Mz] for underactuated designs.
  Eigen::MatrixXd rows;
  if (rank_ == 6) {
    rows = matrix_;
  } else {
    rows.resize(4, matrix_.cols());
    rows.row(0) = matrix_.row(2);
    rows.bottomRows(3) = matrix_.bottomRows(3);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double threshold = sigma.size() > 0 ? 1e-9 * sigma(0) : 0.0;
  Eigen::VectorXd inv_sigma = Eigen::VectorXd::Zero(sigma.size());
  for (int i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > threshold && sigma(i) > 0.0) {
      inv_sigma(i) = 1.0 / sigma(i);
    }
  }
  pinv_ = svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
}

Allocation Allocator::allocate(const Wrench& desired_body) const {
  Eigen::VectorXd demand;
  if (rank_ == 6) {
    demand.resize(6);
    demand.head<3>() = desired_body.force;
    demand.tail<3>() = desired_body.moment;
  } else {
    demand.resize(4);
    demand(0) = desired_body.force.z();
    demand.tail<3>() = desired_body.moment;
  }

  Allocation out;
  out.raw = pinv_ * demand;
  out.clamped = out.raw;
  for (int i = 0; i < out.clamped.size(); ++i) {
    const RotorSpec& rotor = model_.rotors[i];
    const double clamped = std::clamp(out.raw(i), rotor.thrust_min, rotor.thrust_max);
    if (clamped != out.raw(i)) {
      ++out.saturated_count;
    }
    out.clamped(i) = clamped;
  }
  return out;
}

Allocation allocate(const Wrench& desired_body, const AirframeModel& model) {
  return Allocator(model).allocate(desired_body);
}

void validate(const HpfcConfig& config) {
  if (std::abs(config.contact_normal.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("contact_normal must be unit length");
  }
  if (!(config.force_setpoint >= 0.0)) {
    throw std::invalid_argument("force_setpoint must be >= 0");
  }
  if (!(config.force_kp >= 0.0) || !(config.force_ki >= 0.0)) {
    throw std::invalid_argument("force gains must be >= 0");
  }
  if (!(config.force_integral_limit > 0.0)) {
    throw std::invalid_argument("force_integral_limit must be > 0");
  }
  if (!(config.approach_timeout_s > 0.0)) {
    throw std::invalid_argument("approach_timeout_s must be > 0");
  }
  validate(config.position_gains);
}

HpfcController::HpfcController(const HpfcConfig& config, const PidGains& attitude_gains,
                               const AirframeModel& model)
    : config_(config),
      model_(model),
      position_pid_(config.position_gains),
      attitude_(attitude_gains, model.inertia) {
  validate(config_);
  if (actuation_rank(model) < 6) {
    throw std::invalid_argument("hybrid force-position control needs a fully-actuated model");
  }
}

Wrench HpfcController::step(const RigidBodyState& state,
                            const Eigen::Vector3d& path_setpoint,
                            const FTSensorReading& ft, double dt, ControllerDebug* debug) {
  const Eigen::Vector3d normal = config_.contact_normal;
  const Eigen::Matrix3d rotation = state.attitude.toRotationMatrix();

  // Force the vehicle applies to the surface: reaction to the sensed load.
  const double applied_normal_force = -(rotation * ft.force).dot(normal);
  const bool in_contact = applied_normal_force >= config_.contact_threshold;
  if (in_contact) {
    time_out_of_contact_ = 0.0;
  } else {
    time_out_of_contact_ += dt;
    if (time_out_of_contact_ > config_.approach_timeout_s && !fault_) {
      fault_ = "no contact within approach timeout";
    }
  }

  const double force_error = config_.force_setpoint - applied_normal_force;
  force_integral_ = std::clamp(force_integral_ + force_error * dt,
                               -config_.force_integral_limit, config_.force_integral_limit);
  const double force_p = config_.force_kp * force_error;
  const double force_i = config_.force_ki * force_integral_;
  const Eigen::Vector3d force_channel =
      (config_.force_setpoint + force_p + force_i) * normal;

  // Complementary position subspace.
  const Eigen::Matrix3d tangent_projector =
      Eigen::Matrix3d::Identity() - normal * normal.transpose();
  PidTerms terms;
  const Eigen::Vector3d a_des =
      position_pid_.step(tangent_projector * (path_setpoint - state.position),
                         tangent_projector * state.velocity, dt, &terms);
  const Eigen::Vector3d position_channel =
      tangent_projector * (model_.mass * (a_des - gravity_vec()));

  Wrench desired;
  desired.force = rotation.transpose() * (position_channel + force_channel);
  desired.moment = attitude_.step(state, config_.contact_attitude, dt);

  if (debug != nullptr) {
    debug->position = terms;
    debug->force_p = force_p;
    debug->force_i = force_i;
    debug->in_contact = in_contact;
    debug->force_channel_world = force_channel;
    debug->position_channel_world = position_channel;
  }
  return desired;
}

CascadedController::CascadedController(const PidGains& position_gains,
                                       const PidGains& attitude_gains,
                                       const AirframeModel& model)
    : model_(model),
      position_(position_gains),
      attitude_(attitude_gains, model.inertia),
      fully_actuated_(actuation_rank(model) == 6) {}

Wrench CascadedController::step(const RigidBodyState& state,
                                const Eigen::Vector3d& position_setpoint,
                                double yaw_setpoint, double dt, ControllerDebug* debug) {
  PidTerms terms;
  const Eigen::Vector3d a_des = position_.step(state, position_setpoint, dt, &terms);

  const Eigen::Quaterniond attitude_setpoint(
      Eigen::AngleAxisd(yaw_setpoint, Eigen::Vector3d::UnitZ()));
  const ForceAttitudeSetpoint command =
      attitude_from_accel(a_des, yaw_setpoint, model_, fully_actuated_, attitude_setpoint,
                          state.attitude, previous_desired_);
  previous_desired_ = command.attitude;

  Wrench desired;
  desired.force = command.body_force;
  desired.moment = attitude_.step(state, command.attitude, dt);

  if (debug != nullptr) {
    debug->position = terms;
    debug->force_p = 0.0;
    debug->force_i = 0.0;
    debug->in_contact = false;
    debug->force_channel_world.setZero();
    debug->position_channel_world = model_.mass * (a_des - gravity_vec());
  }
  return desired;
}

}  // namespace rotorsim
