#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <vector>

#include "rotorsim/airframe.hpp"

namespace rotorsim {

struct RigidBodyState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();       // m, world
  Eigen::Quaterniond attitude = Eigen::Quaterniond::Identity();  // body-to-world
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();       // m/s, world
  Eigen::Vector3d angular_velocity = Eigen::Vector3d::Zero();  // rad/s, body
  double time = 0.0;                                        // s
};

/// Throws std::invalid_argument on non-finite components or a quaternion
/// more than 1e-9 away from unit norm.
void validate(const RigidBodyState& state);

/// Penalty-contact obstacle: an infinite plane (point + outward unit normal)
/// or an axis-aligned box.
struct Obstacle {
  enum class Kind { Plane, Box };

  Kind kind = Kind::Plane;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();    // plane: point on surface
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();  // plane: outward unit normal
  Eigen::Vector3d box_min = Eigen::Vector3d::Zero();
  Eigen::Vector3d box_max = Eigen::Vector3d::Ones();

  double stiffness = 1000.0;          // N/m
  double damping = 20.0;              // N s/m, resists approach only
  double tangential_damping = 5.0;    // N s/m, viscous in-plane friction

  static Obstacle plane(const Eigen::Vector3d& point, const Eigen::Vector3d& normal,
                        double stiffness = 1000.0, double damping = 20.0,
                        double tangential_damping = 5.0);
  static Obstacle box(const Eigen::Vector3d& box_min, const Eigen::Vector3d& box_max,
                      double stiffness = 1000.0, double damping = 20.0,
                      double tangential_damping = 5.0);
};

void validate(const Obstacle& obstacle);

/// Signed distance of a world point in front of the obstacle surface
/// (negative inside) and the outward surface normal at the closest feature.
struct SurfaceQuery {
  double signed_distance = 0.0;
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
};

SurfaceQuery obstacle_distance(const Obstacle& obstacle, const Eigen::Vector3d& point);

/// Contact wrench measured at the end effector, expressed in the body frame.
/// Moment is zero for the point-contact model but kept for the log schema.
struct FTSensorReading {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();   // N
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();  // N m
};

struct ContactWrench {
  Eigen::Vector3d force_world = Eigen::Vector3d::Zero();
  Eigen::Vector3d moment_body = Eigen::Vector3d::Zero();
};

/// Penalty spring-damper contact at the end-effector point. Normal force is
/// stiffness * depth plus damping against approach, never adhesive;
/// tangential force is viscous while penetrating.
ContactWrench contact_wrench(const RigidBodyState& state, const AirframeModel& model,
                             const Obstacle& obstacle);

struct NetWrench {
  Eigen::Vector3d force_world = Eigen::Vector3d::Zero();
  Eigen::Vector3d moment_body = Eigen::Vector3d::Zero();
  FTSensorReading sensor;
};

/// Sum of rotor, gravity, drag and contact forces. The gyroscopic term
/// -w x Jw is applied inside step(), not here. The sensor reading carries
/// only the contact contribution.
NetWrench net_wrench(const RigidBodyState& state, const AirframeModel& model,
                     const Eigen::VectorXd& thrusts,
                     const std::vector<Obstacle>& obstacles);

/// One classical RK4 step of the Newton-Euler dynamics. Deterministic:
/// identical inputs produce bit-identical outputs. Throws on non-finite
/// state or dt outside (0, 0.1].
RigidBodyState step(const RigidBodyState& state, const AirframeModel& model,
                    const Eigen::VectorXd& thrusts,
                    const std::vector<Obstacle>& obstacles, double dt);

}  // namespace rotorsim
