#include "rotorsim/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace rotorsim {

bool ConvexPolytope::contains(const Eigen::Vector3d& point, double tol) const {
  for (const Halfspace& facet : facets) {
    if (facet.normal.dot(point) > facet.offset + tol) {
      return false;
    }
  }
  return !facets.empty() || !vertices.empty();
}

double ConvexPolytope::extent() const {
  if (vertices.empty()) {
    return 0.0;
  }
  Eigen::Vector3d lo = vertices.front();
  Eigen::Vector3d hi = vertices.front();
  for (const Eigen::Vector3d& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

namespace {

struct Face {
  std::array<int, 3> v;
  Eigen::Vector3d normal;
  double offset = 0.0;
  std::vector<int> outside;
  bool alive = true;
};

double plane_distance(const Face& face, const Eigen::Vector3d& p) {
  return face.normal.dot(p) - face.offset;
}

Face make_face(int a, int b, int c, const std::vector<Eigen::Vector3d>& pts,
               const Eigen::Vector3d& interior) {
  Face face;
  face.v = {a, b, c};
  Eigen::Vector3d normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  const double norm = normal.norm();
  if (norm < std::numeric_limits<double>::min()) {
    throw std::runtime_error("degenerate hull face");
  }
  normal /= norm;
  if (normal.dot(interior - pts[a]) > 0.0) {
    normal = -normal;
    std::swap(face.v[1], face.v[2]);
  }
  face.normal = normal;
  face.offset = normal.dot(pts[a]);
  return face;
}

// Incremental quickhull over a full-dimensional point set.
void quickhull3(const std::vector<Eigen::Vector3d>& pts, double eps,
                ConvexPolytope& out) {
  const int n = static_cast<int>(pts.size());

  // Initial simplex from extremes.
  int i0 = 0, i1 = 0;
  for (int i = 1; i < n; ++i) {
    if (pts[i].x() < pts[i0].x()) i0 = i;
    if (pts[i].x() > pts[i1].x()) i1 = i;
  }
  if (i0 == i1) i1 = (i0 + 1) % n;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = (pts[i] - pts[i0]).norm();
    if (d > best) {
      best = d;
      i1 = i;
    }
  }
  int i2 = -1;
  best = -1.0;
  const Eigen::Vector3d dir = (pts[i1] - pts[i0]).normalized();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d rel = pts[i] - pts[i0];
    const double d = (rel - rel.dot(dir) * dir).norm();
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  Eigen::Vector3d base_normal = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  int i3 = -1;
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(base_normal.dot(pts[i] - pts[i0]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }

  const Eigen::Vector3d interior =
      (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;

  std::vector<Face> faces;
  faces.push_back(make_face(i0, i1, i2, pts, interior));
  faces.push_back(make_face(i0, i1, i3, pts, interior));
  faces.push_back(make_face(i0, i2, i3, pts, interior));
  faces.push_back(make_face(i1, i2, i3, pts, interior));

  // Assign every point to the face it lies farthest outside of.
  const auto assign = [&](int point, std::vector<int>& candidates) {
    double farthest = eps;
    int chosen = -1;
    for (int f : candidates) {
      if (!faces[f].alive) continue;
      const double d = plane_distance(faces[f], pts[point]);
      if (d > farthest) {
        farthest = d;
        chosen = f;
      }
    }
    if (chosen >= 0) {
      faces[chosen].outside.push_back(point);
    }
  };

  {
    std::vector<int> all = {0, 1, 2, 3};
    for (int i = 0; i < n; ++i) {
      if (i == i0 || i == i1 || i == i2 || i == i3) continue;
      assign(i, all);
    }
  }

  for (bool progress = true; progress;) {
    progress = false;
    for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
      if (!faces[fi].alive || faces[fi].outside.empty()) continue;
      progress = true;

      int apex = faces[fi].outside.front();
      double apex_dist = plane_distance(faces[fi], pts[apex]);
      for (int p : faces[fi].outside) {
        const double d = plane_distance(faces[fi], pts[p]);
        if (d > apex_dist) {
          apex_dist = d;
          apex = p;
        }
      }

      // Adjacency via directed edges of the alive faces.
      std::map<std::pair<int, int>, int> edge_owner;
      for (int g = 0; g < static_cast<int>(faces.size()); ++g) {
        if (!faces[g].alive) continue;
        const auto& v = faces[g].v;
        edge_owner[{v[0], v[1]}] = g;
        edge_owner[{v[1], v[2]}] = g;
        edge_owner[{v[2], v[0]}] = g;
      }

      // Flood the visible region outward from the seed face.
      std::vector<int> visible = {fi};
      std::vector<char> seen(faces.size(), 0);
      seen[fi] = 1;
      for (size_t k = 0; k < visible.size(); ++k) {
        const auto& v = faces[visible[k]].v;
        const std::pair<int, int> edges[3] = {{v[1], v[0]}, {v[2], v[1]}, {v[0], v[2]}};
        for (const auto& e : edges) {
          const auto it = edge_owner.find(e);
          if (it == edge_owner.end() || seen[it->second]) continue;
          if (plane_distance(faces[it->second], pts[apex]) > eps) {
            seen[it->second] = 1;
            visible.push_back(it->second);
          }
        }
      }

      // Horizon: directed edges of visible faces whose twin is not visible.
      std::vector<std::pair<int, int>> horizon;
      std::vector<int> orphan_points;
      for (int g : visible) {
        const auto& v = faces[g].v;
        const std::pair<int, int> edges[3] = {{v[0], v[1]}, {v[1], v[2]}, {v[2], v[0]}};
        for (const auto& e : edges) {
          const auto it = edge_owner.find({e.second, e.first});
          if (it == edge_owner.end() || !seen[it->second]) {
            horizon.push_back(e);
          }
        }
        orphan_points.insert(orphan_points.end(), faces[g].outside.begin(),
                             faces[g].outside.end());
        faces[g].alive = false;
        faces[g].outside.clear();
      }

      std::vector<int> fresh;
      for (const auto& e : horizon) {
        faces.push_back(make_face(e.first, e.second, apex, pts, interior));
        fresh.push_back(static_cast<int>(faces.size()) - 1);
      }
      for (int p : orphan_points) {
        if (p == apex) continue;
        assign(p, fresh);
      }
      break;  // rescan from the start; face vector was invalidated
    }
  }

  // Compact to referenced vertices.
  std::vector<int> remap(pts.size(), -1);
  for (const Face& face : faces) {
    if (!face.alive) continue;
    for (int v : face.v) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(pts[v]);
      }
    }
  }
  for (const Face& face : faces) {
    if (!face.alive) continue;
    out.faces.push_back({remap[face.v[0]], remap[face.v[1]], remap[face.v[2]]});
    bool duplicate = false;
    for (const Halfspace& h : out.facets) {
      if (h.normal.dot(face.normal) > 1.0 - 1e-12 &&
          std::abs(h.offset - face.offset) <= 1e-9 * (1.0 + std::abs(h.offset))) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      out.facets.push_back({face.normal, face.offset});
    }
  }
  out.dimension = 3;
}

// Orthonormal directions completing the given unit vector to a frame.
std::pair<Eigen::Vector3d, Eigen::Vector3d> orthonormal_complement(
    const Eigen::Vector3d& axis) {
  int smallest = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(axis[k]) < std::abs(axis[smallest])) smallest = k;
  }
  const Eigen::Vector3d u = axis.cross(Eigen::Vector3d::Unit(smallest)).normalized();
  const Eigen::Vector3d v = axis.cross(u).normalized();
  return {u, v};
}

void hull_point(const std::vector<Eigen::Vector3d>& pts, ConvexPolytope& out) {
  out.vertices.push_back(pts.front());
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d n = Eigen::Vector3d::Unit(k);
    out.facets.push_back({n, n.dot(pts.front())});
    out.facets.push_back({-n, -n.dot(pts.front())});
  }
  out.dimension = 0;
}

void hull_segment(const std::vector<Eigen::Vector3d>& pts, const Eigen::Vector3d& axis,
                  ConvexPolytope& out) {
  int lo = 0, hi = 0;
  for (int i = 1; i < static_cast<int>(pts.size()); ++i) {
    const double t = axis.dot(pts[i]);
    if (t < axis.dot(pts[lo])) lo = i;
    if (t > axis.dot(pts[hi])) hi = i;
  }
  out.vertices.push_back(pts[lo]);
  out.vertices.push_back(pts[hi]);
  out.facets.push_back({axis, axis.dot(pts[hi])});
  out.facets.push_back({-axis, -axis.dot(pts[lo])});
  const auto [u, v] = orthonormal_complement(axis);
  for (const Eigen::Vector3d& w : {u, v}) {
    double b_pos = -std::numeric_limits<double>::infinity();
    double b_neg = -std::numeric_limits<double>::infinity();
    for (const Eigen::Vector3d& p : pts) {
      b_pos = std::max(b_pos, w.dot(p));
      b_neg = std::max(b_neg, -w.dot(p));
    }
    out.facets.push_back({w, b_pos});
    out.facets.push_back({-w, b_neg});
  }
  out.dimension = 1;
}

void hull_polygon(const std::vector<Eigen::Vector3d>& pts, const Eigen::Vector3d& normal,
                  double eps, ConvexPolytope& out) {
  const auto [u, v] = orthonormal_complement(normal);
  const Eigen::Vector3d origin = pts.front();

  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  const auto coord = [&](int i) {
    const Eigen::Vector3d rel = pts[i] - origin;
    return Eigen::Vector2d(u.dot(rel), v.dot(rel));
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Eigen::Vector2d pa = coord(a), pb = coord(b);
    return pa.x() < pb.x() || (pa.x() == pb.x() && pa.y() < pb.y());
  });

  const auto cross = [&](int o, int a, int b) {
    const Eigen::Vector2d po = coord(o), pa = coord(a), pb = coord(b);
    return (pa.x() - po.x()) * (pb.y() - po.y()) - (pa.y() - po.y()) * (pb.x() - po.x());
  };

  // Monotone chain; collinear points are dropped.
  std::vector<int> chain(2 * order.size());
  int k = 0;
  for (int idx : order) {
    while (k >= 2 && cross(chain[k - 2], chain[k - 1], idx) <= eps) --k;
    chain[k++] = idx;
  }
  const int lower = k + 1;
  for (int j = static_cast<int>(order.size()) - 2; j >= 0; --j) {
    const int idx = order[j];
    while (k >= lower && cross(chain[k - 2], chain[k - 1], idx) <= eps) --k;
    chain[k++] = idx;
  }
  chain.resize(k - 1);

  for (int idx : chain) {
    out.vertices.push_back(pts[idx]);
  }
  const int m = static_cast<int>(out.vertices.size());
  for (int i = 2; i < m; ++i) {
    out.faces.push_back({0, i - 1, i});
  }

  double b_pos = -std::numeric_limits<double>::infinity();
  double b_neg = -std::numeric_limits<double>::infinity();
  for (const Eigen::Vector3d& p : pts) {
    b_pos = std::max(b_pos, normal.dot(p));
    b_neg = std::max(b_neg, -normal.dot(p));
  }
  out.facets.push_back({normal, b_pos});
  out.facets.push_back({-normal, b_neg});

  for (int i = 0; i < m; ++i) {
    const Eigen::Vector3d& a = out.vertices[i];
    const Eigen::Vector3d& b = out.vertices[(i + 1) % m];
    const Eigen::Vector3d edge = b - a;
    if (edge.norm() < 1e-12) continue;
    Eigen::Vector3d n = edge.cross(normal).normalized();
    // Point outward: away from the polygon centroid.
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const Eigen::Vector3d& p : out.vertices) centroid += p;
    centroid /= m;
    if (n.dot(centroid - a) > 0.0) n = -n;
    out.facets.push_back({n, n.dot(a)});
  }
  out.dimension = 2;
}

}  // namespace

ConvexPolytope convex_hull(const std::vector<Eigen::Vector3d>& points) {
  if (points.empty()) {
    throw std::invalid_argument("convex_hull needs at least one point");
  }
  for (const Eigen::Vector3d& p : points) {
    if (!p.allFinite()) {
      throw std::invalid_argument("convex_hull points must be finite");
    }
  }

  double scale = 0.0;
  for (const Eigen::Vector3d& p : points) {
    scale = std::max(scale, p.cwiseAbs().maxCoeff());
  }

  // Merge duplicates.
  const double merge_tol = 1e-10 * std::max(scale, 1.0);
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(points.size());
  for (const Eigen::Vector3d& p : points) {
    bool duplicate = false;
    for (const Eigen::Vector3d& q : pts) {
      if ((p - q).lpNorm<Eigen::Infinity>() <= merge_tol) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    pts.push_back(p);
  }

  // Affine dimension from the singular values of the centered cloud.
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const Eigen::Vector3d& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  Eigen::MatrixXd centered(3, pts.size());
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    centered.col(i) = pts[i] - centroid;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullU);
  const Eigen::VectorXd sigma = svd.singularValues();

  ConvexPolytope out;
  const double abs_floor = 1e-12 * (1.0 + scale);
  if (sigma.size() == 0 || sigma(0) <= abs_floor) {
    hull_point(pts, out);
    return out;
  }
  int dim = 1;
  for (int k = 1; k < std::min<int>(3, sigma.size()); ++k) {
    if (sigma(k) > 1e-9 * sigma(0)) ++dim;
  }

  if (dim == 1) {
    hull_segment(pts, svd.matrixU().col(0), out);
  } else if (dim == 2) {
    const double eps2 = 1e-12 * std::max(1.0, scale) * std::max(1.0, scale);
    hull_polygon(pts, svd.matrixU().col(2), eps2, out);
  } else {
    const double eps = 1e-11 * std::max(1.0, scale);
    quickhull3(pts, eps, out);
  }
  return out;
}

}  // namespace rotorsim
