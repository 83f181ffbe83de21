#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rotorsim/airframe.hpp"
#include "rotorsim/hull.hpp"

namespace rotorsim {

/// Attainable body-frame force set: the convex hull of the force images of
/// all 2^n thrust-box corners. Throws std::length_error for n > 16.
ConvexPolytope force_set(const AirframeModel& model);

/// Attainable body-frame moment set, same construction on the moment rows.
ConvexPolytope moment_set(const AirframeModel& model);

/// Orthonormal in-plane basis (u, v) with origin on the plane n.x = b.
struct PlaneBasis {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Vector3d u = Eigen::Vector3d::UnitX();
  Eigen::Vector3d v = Eigen::Vector3d::UnitY();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();

  Eigen::Vector2d project(const Eigen::Vector3d& p) const;
  Eigen::Vector3d unproject(const Eigen::Vector2d& q) const;
};

PlaneBasis make_plane_basis(const Eigen::Vector3d& normal, double offset);

/// Planar slice of a polytope. Vertices are ordered counter-clockwise in
/// the plane basis; empty when the plane misses the set. Degenerate inputs
/// clip to a segment, point or nothing.
struct CrossSection {
  PlaneBasis basis;
  std::vector<Eigen::Vector2d> polygon;

  bool empty() const { return polygon.empty(); }
  double area() const;
  std::vector<Eigen::Vector3d> polygon3d() const;
};

CrossSection cross_section(const ConvexPolytope& polytope,
                           const Eigen::Vector3d& plane_normal, double plane_offset);

/// Gravity-shifted attainable acceleration set A = R*F/m + g and the radius
/// of the largest origin-centered ball inside it. Degenerate sets and sets
/// that exclude the origin give radius 0.
struct OmniAcceleration {
  double radius = 0.0;       // m/s^2
  ConvexPolytope polytope;   // world-frame acceleration set
};

OmniAcceleration omni_acceleration(const AirframeModel& model,
                                   const Eigen::Quaterniond& attitude =
                                       Eigen::Quaterniond::Identity());

inline double omni_acceleration_radius(const AirframeModel& model,
                                       const Eigen::Quaterniond& attitude =
                                           Eigen::Quaterniond::Identity()) {
  return omni_acceleration(model, attitude).radius;
}

/// Standard step-response figures: 10-90% rise, +-2% settling band measured
/// from the first sample, percentage overshoot past the setpoint, and the
/// mean error over the final 10% of samples.
struct StepMetrics {
  double rise_time_s = 0.0;
  double settling_time_s = 0.0;
  double overshoot_percent = 0.0;
  double steady_state_error = 0.0;
};

/// rose is false when the response never crosses 10% of the commanded step,
/// in which case the metrics are undefined and left zero.
struct StepMetricsResult {
  bool rose = false;
  StepMetrics metrics;
};

/// Requires at least two samples and strictly increasing times (throws
/// std::invalid_argument otherwise). Crossings are linearly interpolated.
StepMetricsResult step_metrics(std::span<const double> times,
                               std::span<const double> values, double setpoint,
                               double initial);

/// OFF mesh export (vertex/face list). Degenerate sets are written with the
/// faces they have: a polygon for dimension 2, bare vertices below that.
void write_off(const ConvexPolytope& polytope, std::ostream& out);
void write_off_file(const ConvexPolytope& polytope, const std::string& path);

/// Cross-section polygon as CSV with "x,y" columns in the plane basis.
void write_cross_section_csv(const CrossSection& section, std::ostream& out);
void write_cross_section_csv_file(const CrossSection& section, const std::string& path);

}  // namespace rotorsim
