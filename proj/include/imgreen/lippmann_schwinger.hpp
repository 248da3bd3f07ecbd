#pragma once

// Midpoint-rule Lippmann-Schwinger solver u = u_inc - G0(v u) on a
// VolumeGrid, and the boundary operators built from it: G_v(k) and the
// Herglotz-type operator H_v(k).

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/LU>

#include "imgreen/boundary_operator.hpp"
#include "imgreen/errors.hpp"
#include "imgreen/forward.hpp"
#include "imgreen/geometry.hpp"
#include "imgreen/specfun.hpp"

namespace imgreen {

/// h^2-weighted G0 integral over the cell centered at the evaluation point:
/// analytic integral of -(1/2pi) ln r over the square plus the constant part
/// of the small-argument expansion.
inline cplx self_cell_integral(double k, double h) {
  const double h2 = h * h;
  const double log_part = -(h2 / 2.0) * (std::log(h2 / 2.0) - 3.0 + kPi / 2.0) / (2.0 * kPi);
  return log_part + h2 * cplx(-(std::log(0.5 * k) + kEulerGamma) / (2.0 * kPi), 0.25);
}

struct FieldSolution {
  CVector boundary_trace;   // on mesh nodes (may be empty)
  CVector volume_values;    // on all grid cells
  CVector farfield;         // on a direction grid (may be empty)
};

/// Factorized discrete operator I + G0 V restricted to the active cells
/// (cells with v != 0, or an explicit mask).
class LippmannSchwinger {
 public:
  LippmannSchwinger(const VolumeGrid& grid, const Potential& v, double k, std::vector<bool> force_active = {})
      : grid_(&grid), k_(k) {
    if (!(k > 0.0)) throw DomainError("Lippmann-Schwinger: wavenumber must be positive");
    if (v.size() != grid.size()) throw DomainError("Lippmann-Schwinger: potential does not match the grid");
    for (int c = 0; c < grid.size(); ++c) {
      const bool forced = !force_active.empty() && force_active[c];
      if (v.values[c] != 0.0 || forced) active_.push_back(c);
    }
    const int na = static_cast<int>(active_.size());
    vact_.resize(na);
    for (int a = 0; a < na; ++a) vact_[a] = v.values[active_[a]];
    if (na == 0) return;

    const double h2 = grid.cell_area;
    const cplx self = self_cell_integral(k, grid.h);
    Vmat_.resize(na, na);
    for (int b = 0; b < na; ++b) {
      for (int a = 0; a < na; ++a) {
        if (a == b) {
          Vmat_(a, b) = self;
        } else {
          const double r = (grid.centers[active_[a]] - grid.centers[active_[b]]).norm();
          Vmat_(a, b) = h2 * specfun::green0(2, k, r);
        }
      }
    }
    CMatrix A = Vmat_ * vact_.asDiagonal();
    A.diagonal().array() += 1.0;
    lu_.compute(A);
    if (!(lu_.rcond() > 1e-12)) {
      throw PreconditionError("interior resonance or too-strong potential (condition > 1e12)");
    }
  }

  const std::vector<int>& active() const { return active_; }
  const RVector& active_values() const { return vact_; }
  double k() const { return k_; }
  const VolumeGrid& grid() const { return *grid_; }

  /// Solves (I + G0 V) u = rhs on the active cells (columns of `rhs`).
  CMatrix solve_active(const CMatrix& rhs) const {
    if (active_.empty()) return rhs;
    return lu_.solve(rhs);
  }

  /// G0(x_i, x_c) for points x_i against active cells.
  CMatrix point_to_active(const std::vector<Vec2>& pts) const {
    CMatrix B(pts.size(), active_.size());
    for (std::size_t c = 0; c < active_.size(); ++c) {
      const Vec2& xc = grid_->centers[active_[c]];
      for (std::size_t i = 0; i < pts.size(); ++i) B(i, c) = specfun::green0(2, k_, (pts[i] - xc).norm());
    }
    return B;
  }

  /// Full grid solution for a right-hand side given on every cell.
  FieldSolution solve(const CVector& rhs) const {
    if (rhs.size() != grid_->size()) throw DomainError("Lippmann-Schwinger: right-hand side size mismatch");
    const int na = static_cast<int>(active_.size());
    CVector ra(na);
    for (int a = 0; a < na; ++a) ra[a] = rhs[active_[a]];
    const CVector ua = solve_active(ra);
    const CVector src = grid_->cell_area * (vact_.cast<cplx>().array() * ua.array()).matrix();
    FieldSolution out;
    out.volume_values = rhs;
    std::vector<int> slot(grid_->size(), -1);
    for (int a = 0; a < na; ++a) slot[active_[a]] = a;
    for (int c = 0; c < grid_->size(); ++c) {
      if (slot[c] >= 0) {
        out.volume_values[c] = ua[slot[c]];
        continue;
      }
      cplx acc = 0.0;
      for (int a = 0; a < na; ++a) {
        const double r = (grid_->centers[c] - grid_->centers[active_[a]]).norm();
        acc += specfun::green0(2, k_, r) * src[a];
      }
      out.volume_values[c] -= acc;
    }
    return out;
  }

 private:
  const VolumeGrid* grid_;
  double k_;
  std::vector<int> active_;
  RVector vact_;
  CMatrix Vmat_;
  Eigen::PartialPivLU<CMatrix> lu_;
};

inline FieldSolution solve_lippmann_schwinger(const VolumeGrid& grid, const Potential& v, double k,
                                              const CVector& rhs) {
  return LippmannSchwinger(grid, v, k).solve(rhs);
}

/// Smooth part G_v - G_0 of the boundary Green kernel, as a symmetric
/// n x n matrix of kernel values: -h^2 B V (I + G0 V)^{-1} B^T.
inline CMatrix green_remainder(const LippmannSchwinger& ls, const BoundaryMesh& mesh) {
  const int n = mesh.size();
  if (ls.active().empty()) return CMatrix::Zero(n, n);
  const CMatrix B = ls.point_to_active(mesh.nodes);
  const CMatrix Bt = B.transpose();
  const CMatrix U = ls.solve_active(Bt);
  return -ls.grid().cell_area * (B * ls.active_values().asDiagonal() * U);
}

/// G_v(k) = G_0(k) + (G_v - G_0); only the G_0 part needs singular quadrature.
inline BoundaryOperator assemble_Gv(const BoundaryMesh& mesh, const VolumeGrid& grid, const Potential& v, double k) {
  BoundaryOperator G = assemble_G0(mesh, k);
  const LippmannSchwinger ls(grid, v, k);
  G.matrix += green_remainder(ls, mesh) * mesh.weights.asDiagonal();
  return G;
}

/// Total fields psi_v(x_i, k omega_j) at boundary nodes for incident plane
/// waves exp(i k omega_j . x).
inline CMatrix total_fields(const LippmannSchwinger& ls, const BoundaryMesh& mesh, const DirectionGrid& dirs) {
  const double k = ls.k();
  const int n = mesh.size(), m = dirs.size();
  CMatrix psi(n, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) psi(i, j) = std::exp(cplx(0.0, k * dirs.dirs[j].dot(mesh.nodes[i])));
  }
  const int na = static_cast<int>(ls.active().size());
  if (na == 0) return psi;
  CMatrix E(na, m);
  for (int j = 0; j < m; ++j) {
    for (int a = 0; a < na; ++a) {
      E(a, j) = std::exp(cplx(0.0, k * dirs.dirs[j].dot(ls.grid().centers[ls.active()[a]])));
    }
  }
  const CMatrix U = ls.solve_active(E);
  const CMatrix B = ls.point_to_active(mesh.nodes);
  psi -= ls.grid().cell_area * (B * ls.active_values().asDiagonal() * U);
  return psi;
}

/// H_v(k): L2(sphere) -> L2(boundary), (H g)(x) = int psi_v(x, k omega) g(omega) ds(omega).
inline BoundaryOperator assemble_herglotz(const BoundaryMesh& mesh, const VolumeGrid& grid, const Potential& v,
                                          double k, const DirectionGrid& dirs) {
  const LippmannSchwinger ls(grid, v, k);
  CMatrix H = total_fields(ls, mesh, dirs) * dirs.weights.asDiagonal();
  return {std::move(H), sphere_space(dirs), boundary_space(mesh)};
}

/// c1(2, k) H_v H_v*, the Stone-type representation of Im G_v.
inline BoundaryOperator herglotz_imgv(const BoundaryMesh& mesh, const VolumeGrid& grid, const Potential& v, double k,
                                      const DirectionGrid& dirs) {
  const BoundaryOperator H = assemble_herglotz(mesh, grid, v, k, dirs);
  return c1(2, k) * (H * H.adjoint());
}

/// R conj(H_v)*: (R conj(H)* h)(omega) = int psi_v(x, -k omega) h(x) ds(x).
/// Requires an even number of directions so that -omega is on the grid.
inline BoundaryOperator reflected_conj_herglotz_adjoint(const BoundaryMesh& mesh, const VolumeGrid& grid,
                                                        const Potential& v, double k, const DirectionGrid& dirs) {
  const int m = dirs.size();
  if (m % 2 != 0) throw DomainError("reflection needs an even number of directions");
  const LippmannSchwinger ls(grid, v, k);
  const CMatrix psi = total_fields(ls, mesh, dirs);
  CMatrix L(m, mesh.size());
  for (int j = 0; j < m; ++j) {
    const int jr = (j + m / 2) % m;
    for (int i = 0; i < mesh.size(); ++i) L(j, i) = psi(i, jr) * mesh.weights[i];
  }
  return {std::move(L), boundary_space(mesh), sphere_space(dirs)};
}

}  // namespace imgreen
