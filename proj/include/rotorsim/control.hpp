#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <optional>
#include <string>

#include "rotorsim/airframe.hpp"
#include "rotorsim/dynamics.hpp"

namespace rotorsim {

struct PidGains {
  Eigen::Vector3d kp = Eigen::Vector3d::Zero();
  Eigen::Vector3d ki = Eigen::Vector3d::Zero();
  Eigen::Vector3d kd = Eigen::Vector3d::Zero();
  Eigen::Vector3d integral_limit = Eigen::Vector3d::Ones();  // clamp on the integral state
  Eigen::Vector3d output_limit = Eigen::Vector3d::Ones() * 1e9;
};

void validate(const PidGains& gains);

/// Frozen defaults, stable on all built-in presets at dt = 1 ms.
PidGains default_position_gains();
PidGains default_attitude_gains();

struct PidTerms {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  Eigen::Vector3d i = Eigen::Vector3d::Zero();
  Eigen::Vector3d d = Eigen::Vector3d::Zero();
};

/// Per-axis PID with rectangular integral accumulation: the integral is
/// advanced by e*dt and clamped before the output is formed, so a constant
/// error e held for N steps contributes ki * e * N * dt exactly.
class VectorPid {
 public:
  VectorPid() = default;
  explicit VectorPid(const PidGains& gains) : gains_(gains) {}

  /// output = kp.e + ki.I - kd.rate, clamped per axis to output_limit.
  Eigen::Vector3d step(const Eigen::Vector3d& error, const Eigen::Vector3d& rate,
                       double dt, PidTerms* terms = nullptr);

  const Eigen::Vector3d& integral() const { return integral_; }
  const PidGains& gains() const { return gains_; }
  void reset() { integral_.setZero(); }

 private:
  PidGains gains_;
  Eigen::Vector3d integral_ = Eigen::Vector3d::Zero();
};

/// Position loop: desired world acceleration from position error and
/// measured velocity (derivative on measurement).
class PositionController {
 public:
  PositionController() = default;
  explicit PositionController(const PidGains& gains) : pid_(gains) {}

  Eigen::Vector3d step(const RigidBodyState& state, const Eigen::Vector3d& setpoint,
                       double dt, PidTerms* terms = nullptr);

  void reset() { pid_.reset(); }
  const VectorPid& pid() const { return pid_; }

 private:
  VectorPid pid_;
};

/// Output of the acceleration-to-attitude stage.
struct ForceAttitudeSetpoint {
  Eigen::Quaterniond attitude = Eigen::Quaterniond::Identity();
  Eigen::Vector3d body_force = Eigen::Vector3d::Zero();  // N, body frame
  bool degenerate = false;
};

/// Underactuated path: tilt so body z carries m*(a_des - g), collective
/// thrust = m*|a_des - g|, yaw from the setpoint. Demands below 1e-6 m/s^2
/// are degenerate: previous attitude is held and thrust is zero.
/// Fully-actuated path: attitude setpoint passes through and the full 3-D
/// force demand is expressed in the body frame of the current attitude.
ForceAttitudeSetpoint attitude_from_accel(const Eigen::Vector3d& a_des, double yaw_setpoint,
                                          const AirframeModel& model, bool fully_actuated,
                                          const Eigen::Quaterniond& attitude_setpoint,
                                          const Eigen::Quaterniond& current_attitude,
                                          const Eigen::Quaterniond& previous_desired);

/// Attitude loop: M = J*(kp.e_rot + ki.I - kd.w) + w x Jw, where e_rot is
/// the rotation vector of q_des * q^-1 taken the short way (w >= 0).
class AttitudeController {
 public:
  AttitudeController() = default;
  AttitudeController(const PidGains& gains, const Eigen::Matrix3d& inertia)
      : pid_(gains), inertia_(inertia) {}

  Eigen::Vector3d step(const RigidBodyState& state, const Eigen::Quaterniond& desired,
                       double dt, PidTerms* terms = nullptr);

  void reset() { pid_.reset(); }

 private:
  VectorPid pid_;
  Eigen::Matrix3d inertia_ = Eigen::Matrix3d::Identity();
};

/// Rotation vector of the attitude error q_des * q^-1, sign-corrected so
/// the rotation takes the short way (|vector| <= pi).
Eigen::Vector3d attitude_error_vector(const Eigen::Quaterniond& desired,
                                      const Eigen::Quaterniond& current);

struct Allocation {
  Eigen::VectorXd raw;      // pseudo-inverse solution before clamping
  Eigen::VectorXd clamped;  // element-wise clamped to rotor bounds
  int saturated_count = 0;
};

/// Thrust allocation u = B+ * w via Moore-Penrose pseudo-inverse, clamped to
/// per-rotor bounds. Rank-deficient models are allocated on the reduced rows
/// [Fz, Mx, My, Mz]. The pseudo-inverse is cached at construction.
class Allocator {
 public:
  explicit Allocator(const AirframeModel& model);

  Allocation allocate(const Wrench& desired_body) const;

  int rank() const { return rank_; }
  bool fully_actuated() const { return rank_ == 6; }
  const EffectivenessMatrix& matrix() const { return matrix_; }

 private:
  AirframeModel model_;
  EffectivenessMatrix matrix_;
  Eigen::MatrixXd pinv_;  // 6 or 4 columns depending on rank
  int rank_ = 0;
};

/// One-shot convenience wrapper over Allocator.
Allocation allocate(const Wrench& desired_body, const AirframeModel& model);

struct HpfcConfig {
  Eigen::Vector3d contact_normal = Eigen::Vector3d::UnitX();  // world, into the surface
  double force_setpoint = 5.0;   // N
  double force_kp = 0.5;
  double force_ki = 2.0;
  double force_integral_limit = 3.0;   // N s, clamp on the force integral state
  double contact_threshold = 0.01;     // N, below this counts as no contact
  double approach_timeout_s = 5.0;     // fault when out of contact this long
  Eigen::Quaterniond contact_attitude = Eigen::Quaterniond::Identity();
  PidGains position_gains;             // in-plane axes
};

void validate(const HpfcConfig& config);

struct ControllerDebug {
  PidTerms position;
  double force_p = 0.0;
  double force_i = 0.0;
  bool in_contact = false;
  Eigen::Vector3d force_channel_world = Eigen::Vector3d::Zero();
  Eigen::Vector3d position_channel_world = Eigen::Vector3d::Zero();
};

/// Hybrid force-position control: PI force regulation along the contact
/// normal, PID position control in the orthogonal plane, attitude held at
/// the configured contact attitude. Requires a fully-actuated model.
class HpfcController {
 public:
  HpfcController(const HpfcConfig& config, const PidGains& attitude_gains,
                 const AirframeModel& model);

  Wrench step(const RigidBodyState& state, const Eigen::Vector3d& path_setpoint,
              const FTSensorReading& ft, double dt, ControllerDebug* debug = nullptr);

  /// Set when no contact has been seen for longer than the approach timeout.
  const std::optional<std::string>& fault() const { return fault_; }

  const HpfcConfig& config() const { return config_; }

 private:
  HpfcConfig config_;
  AirframeModel model_;
  VectorPid position_pid_;
  AttitudeController attitude_;
  double force_integral_ = 0.0;
  double time_out_of_contact_ = 0.0;
  std::optional<std::string> fault_;
};

/// Nested position -> attitude PID cascade producing a desired body wrench.
/// Fully-actuated models translate at the commanded attitude; underactuated
/// models tilt to aim collective thrust.
class CascadedController {
 public:
  CascadedController(const PidGains& position_gains, const PidGains& attitude_gains,
                     const AirframeModel& model);

  Wrench step(const RigidBodyState& state, const Eigen::Vector3d& position_setpoint,
              double yaw_setpoint, double dt, ControllerDebug* debug = nullptr);

 private:
  AirframeModel model_;
  PositionController position_;
  AttitudeController attitude_;
  Eigen::Quaterniond previous_desired_ = Eigen::Quaterniond::Identity();
  bool fully_actuated_ = false;
};

}  // namespace rotorsim
