#pragma once

// Boundary meshes (closed curves in the plane), volume grids on the enclosed
// domain, sampled potentials and direction grids on the unit circle.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "imgreen/errors.hpp"
#include "imgreen/types.hpp"

namespace imgreen {

enum class CurveKind { circle, star };

/// Trapezoid-rule discretization of a closed C^2 curve x(t), t = 2 pi j / n.
struct BoundaryMesh {
  CurveKind kind = CurveKind::circle;
  double radius = 1.0;                          // circle radius, or star scale
  std::vector<std::pair<int, double>> coeffs;   // star: r = radius (1 + sum a_j cos j t)
  std::vector<Vec2> nodes;
  std::vector<Vec2> normals;                    // unit outward
  std::vector<Vec2> d1;                         // x'(t)
  std::vector<Vec2> d2;                         // x''(t)
  RVector speed;                                // |x'(t)|
  RVector weights;                              // (2 pi / n) |x'(t)|
  RVector curvature;

  int size() const { return static_cast<int>(nodes.size()); }
  double param(int j) const { return 2.0 * kPi * j / size(); }
  double length() const { return weights.sum(); }
  bool is_circle() const { return kind == CurveKind::circle; }
};

/// Smooth 2 pi-periodic radial function with its first two derivatives.
struct RadialFunction {
  std::function<double(double)> r;
  std::function<double(double)> dr;
  std::function<double(double)> ddr;
};

inline RadialFunction cosine_series(double scale, const std::vector<std::pair<int, double>>& coeffs) {
  RadialFunction f;
  f.r = [=](double t) {
    double s = 1.0;
    for (const auto& [j, a] : coeffs) s += a * std::cos(j * t);
    return scale * s;
  };
  f.dr = [=](double t) {
    double s = 0.0;
    for (const auto& [j, a] : coeffs) s -= a * j * std::sin(j * t);
    return scale * s;
  };
  f.ddr = [=](double t) {
    double s = 0.0;
    for (const auto& [j, a] : coeffs) s -= a * j * j * std::cos(j * t);
    return scale * s;
  };
  return f;
}

namespace detail {

inline void check_mesh_size(int n) {
  if (n < 8 || n % 2 != 0) {
    throw DomainError("mesh size must be even and >= 8, got " + std::to_string(n));
  }
}

inline void finish_mesh(BoundaryMesh& m) {
  const int n = m.size();
  m.speed.resize(n);
  m.weights.resize(n);
  m.curvature.resize(n);
  m.normals.resize(n);
  for (int j = 0; j < n; ++j) {
    const Vec2& a = m.d1[j];
    const Vec2& b = m.d2[j];
    const double s = a.norm();
    m.speed[j] = s;
    m.weights[j] = 2.0 * kPi / n * s;
    m.normals[j] = Vec2(a.y(), -a.x()) / s;
    m.curvature[j] = (a.x() * b.y() - a.y() * b.x()) / (s * s * s);
  }
}

}  // namespace detail

inline BoundaryMesh make_circle(double R, int n) {
  if (!(R > 0.0)) throw DomainError("make_circle: radius must be positive");
  detail::check_mesh_size(n);
  BoundaryMesh m;
  m.kind = CurveKind::circle;
  m.radius = R;
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * kPi * j / n;
    const double c = std::cos(t), s = std::sin(t);
    m.nodes.emplace_back(R * c, R * s);
    m.d1.emplace_back(-R * s, R * c);
    m.d2.emplace_back(-R * c, -R * s);
  }
  detail::finish_mesh(m);
  return m;
}

/// Polar curve x(t) = r(t)(cos t, sin t). Rejects the curve unless
/// x . nu_x > 0 at every node.
inline BoundaryMesh make_star(const RadialFunction& f, int n) {
  detail::check_mesh_size(n);
  BoundaryMesh m;
  m.kind = CurveKind::star;
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * kPi * j / n;
    const double c = std::cos(t), s = std::sin(t);
    const double r = f.r(t), dr = f.dr(t), ddr = f.ddr(t);
    if (!(r > 0.0)) {
      throw DomainError("make_star: curve is not starlike, r(t) <= 0 at node " + std::to_string(j));
    }
    m.nodes.emplace_back(r * c, r * s);
    m.d1.emplace_back(dr * c - r * s, dr * s + r * c);
    m.d2.emplace_back((ddr - r) * c - 2.0 * dr * s, (ddr - r) * s + 2.0 * dr * c);
  }
  detail::finish_mesh(m);
  for (int j = 0; j < n; ++j) {
    if (!(m.nodes[j].dot(m.normals[j]) > 0.0)) {
      throw DomainError("make_star: curve is not starlike, x.nu <= 0 at node " + std::to_string(j));
    }
  }
  return m;
}

inline BoundaryMesh make_star(double scale, const std::vector<std::pair<int, double>>& coeffs, int n) {
  BoundaryMesh m = make_star(cosine_series(scale, coeffs), n);
  m.radius = scale;
  m.coeffs = coeffs;
  return m;
}

/// Winding number of the closed polygon through `poly` around `p`.
inline int winding_number(const std::vector<Vec2>& poly, const Vec2& p) {
  int wn = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const double cross = (b.x() - a.x()) * (p.y() - a.y()) - (p.x() - a.x()) * (b.y() - a.y());
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && cross > 0.0) ++wn;
    } else if (b.y() <= p.y() && cross < 0.0) {
      --wn;
    }
  }
  return wn;
}

/// Uniform square cells of side h, centers at ((i + 1/2) h, (j + 1/2) h),
/// kept when the center lies inside the boundary polygon.
struct VolumeGrid {
  double h = 0.0;
  double cell_area = 0.0;
  int i0 = 0, j0 = 0, nx = 0, ny = 0;   // lattice bounding box
  std::vector<Vec2> centers;
  std::vector<std::pair<int, int>> lattice;
  std::vector<bool> inside_mask;        // nx * ny, row-major in j
  std::vector<int> lattice_to_cell;     // -1 outside

  int size() const { return static_cast<int>(centers.size()); }
  double area() const { return cell_area * size(); }

  /// Cell index of lattice point (i, j), or -1 when outside the domain.
  int cell_at(int i, int j) const {
    const int a = i - i0, b = j - j0;
    if (a < 0 || b < 0 || a >= nx || b >= ny) return -1;
    return lattice_to_cell[static_cast<std::size_t>(b) * nx + a];
  }

  Vec2 lattice_point(int i, int j) const { return {(i + 0.5) * h, (j + 0.5) * h}; }
};

inline VolumeGrid make_grid(const BoundaryMesh& mesh, double h) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = xmax;
  for (const Vec2& p : mesh.nodes) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  const double diam = std::max(xmax - xmin, ymax - ymin);
  if (!(h > 0.0) || !(h < diam / 4.0)) {
    throw DomainError("make_grid: cell size must satisfy 0 < h < diam/4");
  }
  VolumeGrid g;
  g.h = h;
  g.cell_area = h * h;
  g.i0 = static_cast<int>(std::floor(xmin / h)) - 1;
  g.j0 = static_cast<int>(std::floor(ymin / h)) - 1;
  g.nx = static_cast<int>(std::ceil(xmax / h)) + 1 - g.i0;
  g.ny = static_cast<int>(std::ceil(ymax / h)) + 1 - g.j0;
  g.inside_mask.assign(static_cast<std::size_t>(g.nx) * g.ny, false);
  g.lattice_to_cell.assign(g.inside_mask.size(), -1);
  for (int b = 0; b < g.ny; ++b) {
    for (int a = 0; a < g.nx; ++a) {
      const int i = g.i0 + a, j = g.j0 + b;
      const Vec2 c = g.lattice_point(i, j);
      if (winding_number(mesh.nodes, c) == 0) continue;
      const std::size_t idx = static_cast<std::size_t>(b) * g.nx + a;
      g.inside_mask[idx] = true;
      g.lattice_to_cell[idx] = g.size();
      g.centers.push_back(c);
      g.lattice.emplace_back(i, j);
    }
  }
  if (g.centers.empty()) throw DomainError("make_grid: no cell center inside the boundary");
  return g;
}

/// Real potential sampled at grid cell centers.
struct Potential {
  RVector values;
  std::string description;

  double sup_norm() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
  int size() const { return static_cast<int>(values.size()); }
};

inline Potential sample_potential(const VolumeGrid& grid, const std::function<double(const Vec2&)>& f,
                                  std::string description = {}) {
  Potential p;
  p.values.resize(grid.size());
  for (int c = 0; c < grid.size(); ++c) p.values[c] = f(grid.centers[c]);
  p.description = std::move(description);
  return p;
}

/// m equispaced directions on the unit circle with weights 2 pi / m.
struct DirectionGrid {
  RVector angles;
  RVector weights;
  std::vector<Vec2> dirs;

  int size() const { return static_cast<int>(angles.size()); }
};

inline DirectionGrid make_directions(int m) {
  if (m < 2) throw DomainError("make_directions: need at least two directions");
  DirectionGrid d;
  d.angles.resize(m);
  d.weights = RVector::Constant(m, 2.0 * kPi / m);
  for (int j = 0; j < m; ++j) {
    d.angles[j] = 2.0 * kPi * j / m;
    d.dirs.emplace_back(std::cos(d.angles[j]), std::sin(d.angles[j]));
  }
  return d;
}

}  // namespace imgreen
