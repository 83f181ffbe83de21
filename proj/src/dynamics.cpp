#include "rotorsim/dynamics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rotorsim {

void validate(const RigidBodyState& state) {
  if (!state.position.allFinite() || !state.velocity.allFinite() ||
      !state.angular_velocity.allFinite() || !state.attitude.coeffs().allFinite() ||
      !std::isfinite(state.time)) {
    throw std::invalid_argument("state must be finite");
  }
  if (std::abs(state.attitude.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("attitude quaternion must be unit length");
  }
}

Obstacle Obstacle::plane(const Eigen::Vector3d& point, const Eigen::Vector3d& normal,
                         double stiffness, double damping, double tangential_damping) {
  Obstacle o;
  o.kind = Kind::Plane;
  o.point = point;
  o.normal = normal;
  o.stiffness = stiffness;
  o.damping = damping;
  o.tangential_damping = tangential_damping;
  return o;
}

Obstacle Obstacle::box(const Eigen::Vector3d& box_min, const Eigen::Vector3d& box_max,
                       double stiffness, double damping, double tangential_damping) {
  Obstacle o;
  o.kind = Kind::Box;
  o.box_min = box_min;
  o.box_max = box_max;
  o.stiffness = stiffness;
  o.damping = damping;
  o.tangential_damping = tangential_damping;
  return o;
}

void validate(const Obstacle& obstacle) {
  if (!(obstacle.stiffness > 0.0)) {
    throw std::invalid_argument("obstacle stiffness must be > 0");
  }
  if (!(obstacle.damping >= 0.0) || !(obstacle.tangential_damping >= 0.0)) {
    throw std::invalid_argument("obstacle damping terms must be >= 0");
  }
  if (obstacle.kind == Obstacle::Kind::Plane) {
    if (std::abs(obstacle.normal.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("plane normal must be unit length");
    }
  } else {
    if (!((obstacle.box_min.array() < obstacle.box_max.array()).all())) {
      throw std::invalid_argument("box min must be below max componentwise");
    }
  }
}

SurfaceQuery obstacle_distance(const Obstacle& obstacle, const Eigen::Vector3d& point) {
  SurfaceQuery query;
  if (obstacle.kind == Obstacle::Kind::Plane) {
    query.normal = obstacle.normal;
    query.signed_distance = obstacle.normal.dot(point - obstacle.point);
    return query;
  }

  const Eigen::Vector3d& lo = obstacle.box_min;
  const Eigen::Vector3d& hi = obstacle.box_max;
  const bool inside = (point.array() > lo.array()).all() && (point.array() < hi.array()).all();
  if (inside) {
    // Nearest face wins; its outward normal is an axis direction.
    double best = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
      const double to_lo = point[axis] - lo[axis];
      const double to_hi = hi[axis] - point[axis];
      if (to_lo < best) {
        best = to_lo;
        query.normal = -Eigen::Vector3d::Unit(axis);
      }
      if (to_hi < best) {
        best = to_hi;
        query.normal = Eigen::Vector3d::Unit(axis);
      }
    }
    query.signed_distance = -best;
    return query;
  }

  const Eigen::Vector3d closest = point.cwiseMax(lo).cwiseMin(hi);
  const Eigen::Vector3d delta = point - closest;
  const double dist = delta.norm();
  query.signed_distance = dist;
  // On a face the normal is exact; on edges/corners use the offset direction.
  query.normal = dist > 1e-12 ? (delta / dist).eval() : Eigen::Vector3d::UnitZ();
  return query;
}

ContactWrench contact_wrench(const RigidBodyState& state, const AirframeModel& model,
                             const Obstacle& obstacle) {
  ContactWrench out;
  const Eigen::Matrix3d rotation = state.attitude.toRotationMatrix();
  const Eigen::Vector3d offset_world = rotation * model.end_effector_offset;
  const Eigen::Vector3d point = state.position + offset_world;

  const SurfaceQuery query = obstacle_distance(obstacle, point);
  const double depth = -query.signed_distance;
  if (depth <= 0.0) {
    return out;
  }

  // World velocity of the contact point; obstacles are static.
  const Eigen::Vector3d point_velocity =
      state.velocity + rotation * state.angular_velocity.cross(model.end_effector_offset);
  const double normal_speed = query.normal.dot(point_velocity);  // >0 separating
  const Eigen::Vector3d tangential_velocity = point_velocity - normal_speed * query.normal;

  const double normal_magnitude =
      obstacle.stiffness * depth + obstacle.damping * std::max(0.0, -normal_speed);
  Eigen::Vector3d force = normal_magnitude * query.normal;
  force -= obstacle.tangential_damping * tangential_velocity;

  out.force_world = force;
  out.moment_body = model.end_effector_offset.cross(rotation.transpose() * force);
  return out;
}

NetWrench net_wrench(const RigidBodyState& state, const AirframeModel& model,
                     const Eigen::VectorXd& thrusts,
                     const std::vector<Obstacle>& obstacles) {
  const EffectivenessMatrix matrix = effectiveness_matrix(model);
  const Eigen::Matrix<double, 6, 1> body_wrench = matrix * thrusts;
  const Eigen::Matrix3d rotation = state.attitude.toRotationMatrix();

  NetWrench out;
  out.force_world = rotation * body_wrench.head<3>() + model.mass * gravity_vec() -
                    model.linear_drag_coefficient * state.velocity;
  out.moment_body = body_wrench.tail<3>();

  Eigen::Vector3d contact_force_world = Eigen::Vector3d::Zero();
  for (const Obstacle& obstacle : obstacles) {
    const ContactWrench contact = contact_wrench(state, model, obstacle);
    contact_force_world += contact.force_world;
    out.moment_body += contact.moment_body;
  }
  out.force_world += contact_force_world;

  out.sensor.force = rotation.transpose() * contact_force_world;
  // Point contact at the sensor origin carries no moment.
  out.sensor.moment.setZero();
  return out;
}

namespace {

struct StateDerivative {
  Eigen::Vector3d position;
  Eigen::Vector4d attitude;  // (w, x, y, z) coefficients
  Eigen::Vector3d velocity;
  Eigen::Vector3d angular_velocity;
};

Eigen::Vector4d quat_coeffs(const Eigen::Quaterniond& q) {
  return {q.w(), q.x(), q.y(), q.z()};
}

Eigen::Quaterniond quat_from_coeffs(const Eigen::Vector4d& c) {
  return {c(0), c(1), c(2), c(3)};
}

// qdot = 0.5 * q (x) (0, w), body-frame rates.
Eigen::Vector4d quat_derivative(const Eigen::Vector4d& q, const Eigen::Vector3d& w) {
  const double qw = q(0), qx = q(1), qy = q(2), qz = q(3);
  return 0.5 * Eigen::Vector4d(-qx * w.x() - qy * w.y() - qz * w.z(),
                               qw * w.x() + qy * w.z() - qz * w.y(),
                               qw * w.y() - qx * w.z() + qz * w.x(),
                               qw * w.z() + qx * w.y() - qy * w.x());
}

struct WorkState {
  Eigen::Vector3d position;
  Eigen::Vector4d attitude;
  Eigen::Vector3d velocity;
  Eigen::Vector3d angular_velocity;
};

WorkState advance(const WorkState& s, const StateDerivative& d, double h) {
  return {s.position + h * d.position, s.attitude + h * d.attitude,
          s.velocity + h * d.velocity, s.angular_velocity + h * d.angular_velocity};
}

}  // namespace

RigidBodyState step(const RigidBodyState& state, const AirframeModel& model,
                    const Eigen::VectorXd& thrusts,
                    const std::vector<Obstacle>& obstacles, double dt) {
  validate(state);
  if (!(dt > 0.0) || dt > 0.1) {
    throw std::invalid_argument("dt must be in (0, 0.1]");
  }
  if (!thrusts.allFinite() || thrusts.size() != model.rotor_count()) {
    throw std::invalid_argument("thrust vector must be finite with one entry per rotor");
  }

  const Eigen::Matrix3d inertia_inv = model.inertia.inverse();

  const auto derivative = [&](const WorkState& s) {
    RigidBodyState probe;
    probe.position = s.position;
    probe.attitude = quat_from_coeffs(s.attitude).normalized();
    probe.velocity = s.velocity;
    probe.angular_velocity = s.angular_velocity;
    probe.time = state.time;

    const NetWrench wrench = net_wrench(probe, model, thrusts, obstacles);
    StateDerivative d;
    d.position = s.velocity;
    d.attitude = quat_derivative(s.attitude, s.angular_velocity);
    d.velocity = wrench.force_world / model.mass;
    d.angular_velocity =
        inertia_inv * (wrench.moment_body -
                       s.angular_velocity.cross(model.inertia * s.angular_velocity));
    return d;
  };

  const WorkState s0{state.position, quat_coeffs(state.attitude), state.velocity,
                     state.angular_velocity};
  const StateDerivative k1 = derivative(s0);
  const StateDerivative k2 = derivative(advance(s0, k1, dt / 2.0));
  const StateDerivative k3 = derivative(advance(s0, k2, dt / 2.0));
  const StateDerivative k4 = derivative(advance(s0, k3, dt));

  RigidBodyState next;
  next.position = s0.position + dt / 6.0 * (k1.position + 2.0 * k2.position +
                                            2.0 * k3.position + k4.position);
  const Eigen::Vector4d attitude =
      s0.attitude + dt / 6.0 * (k1.attitude + 2.0 * k2.attitude + 2.0 * k3.attitude +
                                k4.attitude);
  next.attitude = quat_from_coeffs(attitude).normalized();
  next.velocity = s0.velocity + dt / 6.0 * (k1.velocity + 2.0 * k2.velocity +
                                            2.0 * k3.velocity + k4.velocity);
  next.angular_velocity =
      s0.angular_velocity + dt / 6.0 * (k1.angular_velocity + 2.0 * k2.angular_velocity +
                                        2.0 * k3.angular_velocity + k4.angular_velocity);
  next.time = state.time + dt;

  if (!next.position.allFinite() || !next.velocity.allFinite() ||
      !next.angular_velocity.allFinite() || !next.attitude.coeffs().allFinite()) {
    throw std::runtime_error("integration produced a non-finite state");
  }
  return next;
}

}  // namespace rotorsim
