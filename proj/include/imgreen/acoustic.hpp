#pragma once

// Acoustic media (rho, kappa) and their Schroedinger form: the Liouville
// substitution, the two-frequency split of v into q = rho^{1/2} Lap rho^{-1/2}
// and m = kappa rho, and density recovery from q by a Dirichlet problem.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "imgreen/errors.hpp"
#include "imgreen/geometry.hpp"

namespace imgreen {

struct AcousticModel {
  Potential rho;
  Potential kappa;
  double rho_c = 1.0;
  double kappa_c = 1.0;
};

/// Exact boundary radius in direction theta for circles and cosine-series
/// stars; empty for other curves.
inline std::optional<double> boundary_radius(const BoundaryMesh& mesh, double theta) {
  if (mesh.is_circle()) return mesh.radius;
  if (mesh.coeffs.empty()) return std::nullopt;
  return cosine_series(mesh.radius, mesh.coeffs).r(theta);
}

inline bool inside_domain(const BoundaryMesh& mesh, const Vec2& p) {
  if (const auto r = boundary_radius(mesh, std::atan2(p.y(), p.x()))) return p.norm() < *r;
  return winding_number(mesh.nodes, p) != 0;
}

/// Fraction theta in (0, 1] such that a + theta (b - a) lies on the boundary,
/// for a inside and b outside.
inline double boundary_fraction(const BoundaryMesh& mesh, const Vec2& a, const Vec2& b) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside_domain(mesh, a + mid * (b - a)) ? lo : hi) = mid;
  }
  return std::max(0.5 * (lo + hi), 1e-12);
}

/// 5-point Laplacian of a grid function, with `outside` used for lattice
/// neighbors that are not grid cells.
inline RVector grid_laplacian(const VolumeGrid& grid, const RVector& u, double outside) {
  RVector out(grid.size());
  const double ih2 = 1.0 / (grid.h * grid.h);
  for (int c = 0; c < grid.size(); ++c) {
    const auto [i, j] = grid.lattice[c];
    double s = -4.0 * u[c];
    for (const auto& [di, dj] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1}}) {
      const int nb = grid.cell_at(i + di, j + dj);
      s += nb >= 0 ? u[nb] : outside;
    }
    out[c] = s * ih2;
  }
  return out;
}

inline void check_positive_density(const Potential& rho) {
  for (Eigen::Index c = 0; c < rho.values.size(); ++c) {
    if (!(rho.values[c] > 0.0)) {
      throw DomainError("density must be positive, got " + std::to_string(rho.values[c]) + " at cell " +
                        std::to_string(c));
    }
  }
}

/// v = rho^{1/2} Lap_h rho^{-1/2} + omega^2 (rho_c kappa_c - kappa rho), k = omega sqrt(rho_c kappa_c).
inline std::pair<Potential, double> acoustic_to_schrodinger(const AcousticModel& model, const VolumeGrid& grid,
                                                            double omega) {
  if (model.rho.size() != grid.size() || model.kappa.size() != grid.size()) {
    throw DomainError("acoustic model does not match the grid");
  }
  if (!(model.rho_c > 0.0) || !(model.kappa_c > 0.0)) throw DomainError("rho_c and kappa_c must be positive");
  check_positive_density(model.rho);
  const RVector u = model.rho.values.cwiseSqrt().cwiseInverse();
  const RVector lap = grid_laplacian(grid, u, 1.0 / std::sqrt(model.rho_c));
  Potential v;
  v.values = lap.cwiseQuotient(u) +
             omega * omega * (model.rho_c * model.kappa_c - model.kappa.values.cwiseProduct(model.rho.values).array()).matrix();
  v.description = "liouville(omega=" + std::to_string(omega) + ")";
  return {std::move(v), omega * std::sqrt(model.rho_c * model.kappa_c)};
}

struct Disentangled {
  Potential q;   // rho^{1/2} Lap rho^{-1/2}
  Potential m;   // kappa rho
};

/// Solves v_j = q + omega_j^2 (rho_c kappa_c - m) pointwise for (q, m).
inline Disentangled two_frequency_disentangle(const Potential& v1, double omega1, const Potential& v2, double omega2,
                                              double rho_c, double kappa_c) {
  const double d = omega1 * omega1 - omega2 * omega2;
  if (std::abs(d) < 1e-8) throw DomainError("frequencies too close");
  if (v1.size() != v2.size()) throw DomainError("two_frequency_disentangle: potentials on different grids");
  const double c = rho_c * kappa_c;
  Disentangled out;
  out.m.values = (c - (v1.values - v2.values).array() / d).matrix();
  out.q.values = (v1.values.array() - omega1 * omega1 * (c - out.m.values.array())).matrix();
  out.q.description = "q";
  out.m.description = "kappa rho";
  return out;
}

/// v_j = q + omega^2 (rho_c kappa_c - m): the inverse of the split.
inline Potential recombine(const Disentangled& qm, double omega, double rho_c, double kappa_c) {
  Potential v;
  v.values = (qm.q.values.array() + omega * omega * (rho_c * kappa_c - qm.m.values.array())).matrix();
  v.description = "recombined";
  return v;
}

/// Solves Lap u - q u = 0 in the domain, u = rho_c^{-1/2} on the boundary,
/// with the Shortley-Weller stencil at cells next to the boundary, and
/// returns rho = u^{-2}.
inline Potential recover_density(const Potential& q, double rho_c, const BoundaryMesh& mesh, const VolumeGrid& grid) {
  if (q.size() != grid.size()) throw DomainError("recover_density: q does not match the grid");
  if (!(rho_c > 0.0)) throw DomainError("recover_density: rho_c must be positive");
  const double g = 1.0 / std::sqrt(rho_c);
  const double h = grid.h;
  const int n = grid.size();
  std::vector<Eigen::Triplet<double>> trip;
  RVector rhs = RVector::Zero(n);
  for (int c = 0; c < n; ++c) {
    const auto [i, j] = grid.lattice[c];
    const Vec2 x = grid.centers[c];
    double diag = q.values[c];
    for (int axis = 0; axis < 2; ++axis) {
      int nb[2];
      double dist[2];
      for (int side = 0; side < 2; ++side) {
        const int s = side == 0 ? -1 : 1;
        const int ni = axis == 0 ? i + s : i, nj = axis == 0 ? j : j + s;
        nb[side] = grid.cell_at(ni, nj);
        dist[side] = nb[side] >= 0 ? h : h * boundary_fraction(mesh, x, grid.lattice_point(ni, nj));
      }
      // -u'' ~ -2/(hl+hr) [(u_r - u)/hr - (u - u_l)/hl]
      const double span = dist[0] + dist[1];
      for (int side = 0; side < 2; ++side) {
        const double coef = 2.0 / (span * dist[side]);
        diag += coef;
        if (nb[side] >= 0) {
          trip.emplace_back(c, nb[side], -coef);
        } else {
          rhs[c] += coef * g;
        }
      }
    }
    trip.emplace_back(c, c, diag);
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw PreconditionError("recover_density: singular discrete Dirichlet problem");
  const double logdet = lu.logAbsDeterminant();
  if (!std::isfinite(logdet)) throw PreconditionError("recover_density: singular discrete Dirichlet problem");
  const RVector u = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !u.allFinite() || (A * u - rhs).norm() > 1e-8 * std::max(rhs.norm(), 1.0)) {
    throw PreconditionError("recover_density: discrete Dirichlet problem is numerically singular");
  }
  Potential rho;
  rho.values.resize(n);
  for (int c = 0; c < n; ++c) {
    if (!(u[c] > 0.0)) throw PreconditionError("recover_density: u <= 0, out of theorem's local regime");
    rho.values[c] = 1.0 / (u[c] * u[c]);
  }
  rho.description = "recovered density";
  return rho;
}

/// (rho, kappa) from potentials at two frequencies.
inline AcousticModel recover_acoustic(const Potential& v1, double omega1, const Potential& v2, double omega2,
                                      double rho_c, double kappa_c, const BoundaryMesh& mesh, const VolumeGrid& grid) {
  const Disentangled qm = two_frequency_disentangle(v1, omega1, v2, omega2, rho_c, kappa_c);
  AcousticModel out;
  out.rho_c = rho_c;
  out.kappa_c = kappa_c;
  out.rho = recover_density(qm.q, rho_c, mesh, grid);
  out.kappa.values = qm.m.values.cwiseQuotient(out.rho.values);
  out.kappa.description = "recovered compressibility";
  return out;
}

/// Smooth medium with rho^{-1/2} = rho_c^{-1/2} + a (1 - |x-c|^2/s^2)^5 and
/// kappa = kappa_c + b (1 - |x-d|^2/t^2)^3, both equal to the background near
/// the boundary, with closed-form Laplacian of rho^{-1/2}.
struct ManufacturedMedium {
  double rho_c = 1.0, kappa_c = 1.0;
  double a = 0.2, b = 0.3;
  Vec2 rho_center{0.1, -0.05};
  double rho_support = 0.6;
  Vec2 kappa_center{-0.1, 0.2};
  double kappa_support = 0.5;

  double u(const Vec2& x) const {
    const double q = (x - rho_center).squaredNorm() / (rho_support * rho_support);
    return 1.0 / std::sqrt(rho_c) + (q < 1.0 ? a * std::pow(1.0 - q, 5) : 0.0);
  }

  double laplacian_u(const Vec2& x) const {
    const double s2 = rho_support * rho_support;
    const double q = (x - rho_center).squaredNorm() / s2;
    if (q >= 1.0) return 0.0;
    return a * 4.0 / s2 * (20.0 * q * std::pow(1.0 - q, 3) - 5.0 * std::pow(1.0 - q, 4));
  }

  double rho(const Vec2& x) const { return 1.0 / (u(x) * u(x)); }

  double kappa(const Vec2& x) const {
    const double q = (x - kappa_center).squaredNorm() / (kappa_support * kappa_support);
    return kappa_c + (q < 1.0 ? b * std::pow(1.0 - q, 3) : 0.0);
  }

  /// Exact v(x, omega) = Lap u / u + omega^2 (rho_c kappa_c - kappa rho).
  double v(const Vec2& x, double omega) const {
    return laplacian_u(x) / u(x) + omega * omega * (rho_c * kappa_c - kappa(x) * rho(x));
  }

  AcousticModel sample(const VolumeGrid& grid) const {
    AcousticModel m;
    m.rho_c = rho_c;
    m.kappa_c = kappa_c;
    m.rho = sample_potential(grid, [&](const Vec2& x) { return rho(x); }, "rho");
    m.kappa = sample_potential(grid, [&](const Vec2& x) { return kappa(x); }, "kappa");
    return m;
  }

  Potential exact_potential(const VolumeGrid& grid, double omega) const {
    return sample_potential(grid, [&](const Vec2& x) { return v(x, omega); }, "exact v");
  }
};

struct AcousticConvergence {
  std::vector<double> h;
  std::vector<double> rho_error;     // max |rho_rec - rho| over cells
  std::vector<double> kappa_error;
  double rho_slope = 0.0;            // log2 of the last error ratio
  double kappa_slope = 0.0;
};

/// Two-frequency disentangling and density recovery from the exact
/// potentials on grids h, h/2, ...
inline AcousticConvergence acoustic_convergence(const ManufacturedMedium& med, const BoundaryMesh& mesh, double h,
                                                int levels, double omega1, double omega2) {
  AcousticConvergence out;
  for (int l = 0; l < levels; ++l) {
    const double hl = h / std::pow(2.0, l);
    const VolumeGrid grid = make_grid(mesh, hl);
    const AcousticModel truth = med.sample(grid);
    const AcousticModel rec = recover_acoustic(med.exact_potential(grid, omega1), omega1,
                                               med.exact_potential(grid, omega2), omega2, med.rho_c, med.kappa_c,
                                               mesh, grid);
    out.h.push_back(hl);
    out.rho_error.push_back((rec.rho.values - truth.rho.values).cwiseAbs().maxCoeff());
    out.kappa_error.push_back((rec.kappa.values - truth.kappa.values).cwiseAbs().maxCoeff());
  }
  if (levels >= 2) {
    out.rho_slope = std::log2(out.rho_error[levels - 2] / out.rho_error[levels - 1]);
    out.kappa_slope = std::log2(out.kappa_error[levels - 2] / out.kappa_error[levels - 1]);
  }
  return out;
}

}  // namespace imgreen
