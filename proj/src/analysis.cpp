#include "rotorsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace rotorsim {

namespace {

constexpr int kMaxRotorsForCornerEnumeration = 16;

ConvexPolytope linear_image_set(const AirframeModel& model, int first_row) {
  validate(model);
  const int n = model.rotor_count();
  if (n > kMaxRotorsForCornerEnumeration) {
    throw std::length_error(
        "corner enumeration supports at most 16 rotors; got " + std::to_string(n));
  }

  const EffectivenessMatrix matrix = effectiveness_matrix(model);
  const Eigen::Matrix<double, 3, Eigen::Dynamic> rows = matrix.middleRows(first_row, 3);

  std::vector<Eigen::Vector3d> corners;
  corners.reserve(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    Eigen::Vector3d image = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
      const RotorSpec& rotor = model.rotors[i];
      const double u = (mask >> i & 1u) ? rotor.thrust_max : rotor.thrust_min;
      image += rows.col(i) * u;
    }
    corners.push_back(image);
  }
  return convex_hull(corners);
}

}  // namespace

ConvexPolytope force_set(const AirframeModel& model) { return linear_image_set(model, 0); }

ConvexPolytope moment_set(const AirframeModel& model) { return linear_image_set(model, 3); }

Eigen::Vector2d PlaneBasis::project(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d rel = p - origin;
  return {u.dot(rel), v.dot(rel)};
}

Eigen::Vector3d PlaneBasis::unproject(const Eigen::Vector2d& q) const {
  return origin + q.x() * u + q.y() * v;
}

PlaneBasis make_plane_basis(const Eigen::Vector3d& normal, double offset) {
  const double norm = normal.norm();
  if (norm < 1e-12) {
    throw std::invalid_argument("plane normal must be nonzero");
  }
  PlaneBasis basis;
  basis.normal = normal / norm;
  basis.origin = basis.normal * (offset / norm);
  int smallest = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(basis.normal[k]) < std::abs(basis.normal[smallest])) smallest = k;
  }
  basis.u = basis.normal.cross(Eigen::Vector3d::Unit(smallest)).normalized();
  basis.v = basis.normal.cross(basis.u).normalized();
  return basis;
}

double CrossSection::area() const {
  if (polygon.size() < 3) {
    return 0.0;
  }
  double twice = 0.0;
  for (size_t i = 0; i < polygon.size(); ++i) {
    const Eigen::Vector2d& a = polygon[i];
    const Eigen::Vector2d& b = polygon[(i + 1) % polygon.size()];
    twice += a.x() * b.y() - a.y() * b.x();
  }
  return std::abs(twice) / 2.0;
}

std::vector<Eigen::Vector3d> CrossSection::polygon3d() const {
  std::vector<Eigen::Vector3d> out;
  out.reserve(polygon.size());
  for (const Eigen::Vector2d& q : polygon) {
    out.push_back(basis.unproject(q));
  }
  return out;
}

namespace {

// Ordered, strictly convex polygon from unordered in-plane points.
std::vector<Eigen::Vector2d> order_polygon(std::vector<Eigen::Vector2d> pts, double tol) {
  // Dedupe.
  std::vector<Eigen::Vector2d> unique;
  for (const Eigen::Vector2d& p : pts) {
    bool seen = false;
    for (const Eigen::Vector2d& q : unique) {
      if ((p - q).lpNorm<Eigen::Infinity>() <= tol) {
        seen = true;
        break;
      }
    }
    if (!seen) unique.push_back(p);
  }
  if (unique.size() <= 2) {
    return unique;
  }

  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const Eigen::Vector2d& p : unique) mean += p;
  mean /= static_cast<double>(unique.size());
  std::sort(unique.begin(), unique.end(), [&](const Eigen::Vector2d& a,
                                              const Eigen::Vector2d& b) {
    return std::atan2(a.y() - mean.y(), a.x() - mean.x()) <
           std::atan2(b.y() - mean.y(), b.x() - mean.x());
  });

  // Drop collinear chain points.
  std::vector<Eigen::Vector2d> polygon;
  const auto turn = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                       const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  const size_t m = unique.size();
  for (size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d& prev = unique[(i + m - 1) % m];
    const Eigen::Vector2d& cur = unique[i];
    const Eigen::Vector2d& next = unique[(i + 1) % m];
    if (std::abs(turn(prev, cur, next)) > tol * tol) {
      polygon.push_back(cur);
    }
  }
  return polygon.size() >= 3 ? polygon : unique;
}

}  // namespace

CrossSection cross_section(const ConvexPolytope& polytope,
                           const Eigen::Vector3d& plane_normal, double plane_offset) {
  CrossSection section;
  section.basis = make_plane_basis(plane_normal, plane_offset);
  const Eigen::Vector3d& n = section.basis.normal;
  const double b = plane_offset / plane_normal.norm();

  if (polytope.vertices.empty()) {
    return section;
  }
  const double tol = 1e-9 * (1.0 + polytope.extent());

  // Whole set lies in the plane: the section is the set itself.
  bool coplanar = true;
  for (const Eigen::Vector3d& v : polytope.vertices) {
    if (std::abs(n.dot(v) - b) > tol) {
      coplanar = false;
      break;
    }
  }
  if (coplanar) {
    std::vector<Eigen::Vector2d> pts;
    for (const Eigen::Vector3d& v : polytope.vertices) {
      pts.push_back(section.basis.project(v));
    }
    section.polygon = order_polygon(std::move(pts), tol);
    return section;
  }

  // Edge set by dimension.
  std::set<std::pair<int, int>> edges;
  const auto add_edge = [&edges](int a, int b2) {
    edges.insert({std::min(a, b2), std::max(a, b2)});
  };
  if (polytope.dimension == 3) {
    for (const auto& face : polytope.faces) {
      add_edge(face[0], face[1]);
      add_edge(face[1], face[2]);
      add_edge(face[2], face[0]);
    }
  } else if (polytope.dimension == 2) {
    const int m = static_cast<int>(polytope.vertices.size());
    for (int i = 0; i < m; ++i) {
      add_edge(i, (i + 1) % m);
    }
  } else if (polytope.dimension == 1) {
    add_edge(0, 1);
  }

  std::vector<Eigen::Vector2d> crossings;
  for (const auto& [ia, ib] : edges) {
    const Eigen::Vector3d& p = polytope.vertices[ia];
    const Eigen::Vector3d& q = polytope.vertices[ib];
    const double da = n.dot(p) - b;
    const double db = n.dot(q) - b;
    if (std::abs(da) <= tol) crossings.push_back(section.basis.project(p));
    if (std::abs(db) <= tol) crossings.push_back(section.basis.project(q));
    if ((da > tol && db < -tol) || (da < -tol && db > tol)) {
      const double t = da / (da - db);
      crossings.push_back(section.basis.project(p + t * (q - p)));
    }
  }
  if (polytope.dimension == 0 && std::abs(n.dot(polytope.vertices[0]) - b) <= tol) {
    crossings.push_back(section.basis.project(polytope.vertices[0]));
  }

  section.polygon = order_polygon(std::move(crossings), tol);
  return section;
}

OmniAcceleration omni_acceleration(const AirframeModel& model,
                                   const Eigen::Quaterniond& attitude) {
  const ConvexPolytope forces = force_set(model);
  const Eigen::Matrix3d rotation = attitude.normalized().toRotationMatrix();
  const Eigen::Vector3d g = gravity_vec();
  const double inv_mass = 1.0 / model.mass;

  OmniAcceleration out;
  out.polytope.dimension = forces.dimension;
  out.polytope.faces = forces.faces;
  out.polytope.vertices.reserve(forces.vertices.size());
  for (const Eigen::Vector3d& f : forces.vertices) {
    out.polytope.vertices.push_back(rotation * f * inv_mass + g);
  }
  out.polytope.facets.reserve(forces.facets.size());
  for (const Halfspace& facet : forces.facets) {
    const Eigen::Vector3d normal = rotation * facet.normal;
    out.polytope.facets.push_back({normal, facet.offset * inv_mass + normal.dot(g)});
  }

  if (forces.dimension < 3) {
    out.radius = 0.0;
    return out;
  }
  double radius = std::numeric_limits<double>::infinity();
  for (const Halfspace& facet : out.polytope.facets) {
    radius = std::min(radius, facet.offset);
  }
  out.radius = radius > 0.0 ? radius : 0.0;
  return out;
}

StepMetricsResult step_metrics(std::span<const double> times,
                               std::span<const double> values, double setpoint,
                               double initial) {
  if (times.size() != values.size()) {
    throw std::invalid_argument("times and values must have equal length");
  }
  if (times.size() < 2) {
    throw std::invalid_argument("step metrics need at least two samples");
  }
  for (size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::invalid_argument("times must be strictly increasing");
    }
  }

  StepMetricsResult result;
  const double delta = setpoint - initial;
  if (std::abs(delta) < 1e-300) {
    return result;  // zero step: nothing to rise to
  }

  const auto normalized = [&](size_t i) { return (values[i] - initial) / delta; };

  const auto first_crossing = [&](double level) -> std::optional<double> {
    if (normalized(0) >= level) {
      return times[0];
    }
    for (size_t i = 1; i < times.size(); ++i) {
      const double prev = normalized(i - 1);
      const double cur = normalized(i);
      if (prev < level && cur >= level) {
        const double t = (level - prev) / (cur - prev);
        return times[i - 1] + t * (times[i] - times[i - 1]);
      }
    }
    return std::nullopt;
  };

  const auto c10 = first_crossing(0.1);
  const auto c90 = first_crossing(0.9);
  if (!c10 || !c90) {
    return result;
  }
  result.rose = true;
  result.metrics.rise_time_s = *c90 - *c10;

  // Settling: last departure from the +-2% band, measured from the start.
  const double band = 0.02 * std::abs(delta);
  const auto err = [&](size_t i) { return std::abs(values[i] - setpoint); };
  size_t last_outside = times.size();
  for (size_t i = times.size(); i-- > 0;) {
    if (err(i) > band) {
      last_outside = i;
      break;
    }
  }
  if (last_outside == times.size()) {
    result.metrics.settling_time_s = 0.0;
  } else if (last_outside == times.size() - 1) {
    result.metrics.settling_time_s = times.back() - times.front();
  } else {
    const double e0 = err(last_outside);
    const double e1 = err(last_outside + 1);
    const double t = e0 > e1 ? (e0 - band) / (e0 - e1) : 0.0;
    const double crossing =
        times[last_outside] + t * (times[last_outside + 1] - times[last_outside]);
    result.metrics.settling_time_s = crossing - times.front();
  }

  double peak = 0.0;
  const double sign = delta > 0.0 ? 1.0 : -1.0;
  for (size_t i = 0; i < values.size(); ++i) {
    peak = std::max(peak, (values[i] - setpoint) * sign);
  }
  result.metrics.overshoot_percent = 100.0 * peak / std::abs(delta);

  const size_t tail = std::max<size_t>(1, values.size() / 10);
  double mean = 0.0;
  for (size_t i = values.size() - tail; i < values.size(); ++i) {
    mean += values[i];
  }
  mean /= static_cast<double>(tail);
  result.metrics.steady_state_error = std::abs(setpoint - mean);
  return result;
}

namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_off(const ConvexPolytope& polytope, std::ostream& out) {
  out << "OFF\n";
  std::vector<std::vector<int>> faces;
  if (polytope.dimension == 3) {
    for (const auto& f : polytope.faces) {
      faces.push_back({f[0], f[1], f[2]});
    }
  } else if (polytope.dimension == 2 && polytope.vertices.size() >= 3) {
    std::vector<int> polygon(polytope.vertices.size());
    for (size_t i = 0; i < polygon.size(); ++i) polygon[i] = static_cast<int>(i);
    faces.push_back(polygon);
  }
  out << polytope.vertices.size() << " " << faces.size() << " 0\n";
  for (const Eigen::Vector3d& v : polytope.vertices) {
    out << format_double(v.x()) << " " << format_double(v.y()) << " "
        << format_double(v.z()) << "\n";
  }
  for (const auto& face : faces) {
    out << face.size();
    for (int idx : face) {
      out << " " << idx;
    }
    out << "\n";
  }
}

void write_off_file(const ConvexPolytope& polytope, const std::string& path) {
  std::ofstream file(path);
  if (!file) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  write_off(polytope, file);
}

void write_cross_section_csv(const CrossSection& section, std::ostream& out) {
  out << "x,y\n";
  for (const Eigen::Vector2d& p : section.polygon) {
    out << format_double(p.x()) << "," << format_double(p.y()) << "\n";
  }
}

void write_cross_section_csv_file(const CrossSection& section, const std::string& path) {
  std::ofstream file(path);
  if (!file) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  write_cross_section_csv(section, file);
}

}  // namespace rotorsim
