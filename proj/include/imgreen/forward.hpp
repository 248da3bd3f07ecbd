#pragma once

// Boundary operators on a closed curve: single layer G0(k), the Laplace
// single layer E, W(k), the double layer, the far-field map T(k),
// Q(k) = Im G0^{-1}, the conjugated operator T G T* and the scattering
// matrix. Log-singular kernels use the Kress product quadrature.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/LU>

#include "imgreen/boundary_operator.hpp"
#include "imgreen/errors.hpp"
#include "imgreen/geometry.hpp"
#include "imgreen/specfun.hpp"

namespace imgreen {

/// c1(d, k) = (1/8pi) (k/2pi)^{d-2}.
inline double c1(int d, double k) { return std::pow(k / (2.0 * kPi), d - 2) / (8.0 * kPi); }

/// c2(d, k) = (1/4pi) exp(-i pi (d-3)/4) (k/2pi)^{(d-3)/2}.
inline cplx c2(int d, double k) {
  return std::exp(cplx(0.0, -kPi * (d - 3) / 4.0)) * std::pow(k / (2.0 * kPi), 0.5 * (d - 3)) / (4.0 * kPi);
}

inline Space boundary_space(const BoundaryMesh& mesh) { return boundary_space(mesh.weights); }
inline Space sphere_space(const DirectionGrid& dirs) { return sphere_space(dirs.weights); }

namespace kress {

/// Weights R(d) of the product rule
/// int_0^{2pi} ln(4 sin^2((t_i - s)/2)) f(s) ds ~ sum_j R(i - j) f(t_j).
inline RVector log_weights(int n) {
  const int N = n / 2;
  RVector R(n);
  for (int d = 0; d < n; ++d) {
    double s = 0.0;
    for (int m = 1; m < N; ++m) s += std::cos(m * kPi * d / N) / m;
    R[d] = -2.0 * kPi / N * s - kPi / (static_cast<double>(N) * N) * std::cos(kPi * d);
  }
  return R;
}

struct Split {
  cplx l1;   // coefficient of ln(4 sin^2((t - s)/2))
  cplx l2;   // smooth remainder
};

/// Nystrom matrix sum_j [R(i-j) L1(i,j) + (2pi/n) L2(i,j)] |x'(t_j)|, where
/// kernel(i, j, logterm) returns the split of K(x_i, x_j) (logterm is the
/// log factor for i != j and unused on the diagonal).
template <typename Kernel>
CMatrix assemble(const BoundaryMesh& mesh, Kernel&& kernel) {
  const int n = mesh.size();
  const RVector R = log_weights(n);
  CMatrix M(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int d = ((i - j) % n + n) % n;
      double logterm = 0.0;
      if (i != j) {
        const double s = std::sin(0.5 * (mesh.param(i) - mesh.param(j)));
        logterm = std::log(4.0 * s * s);
      }
      const Split sp = kernel(i, j, logterm);
      M(i, j) = (R[d] * sp.l1 + (2.0 * kPi / n) * sp.l2) * mesh.speed[j];
    }
  }
  return M;
}

}  // namespace kress

/// Single-layer operator with kernel G0(x, y, k), d = 2.
inline BoundaryOperator assemble_G0(const BoundaryMesh& mesh, double k) {
  if (!(k > 0.0)) throw DomainError("assemble_G0: wavenumber must be positive");
  CMatrix M = kress::assemble(mesh, [&](int i, int j, double logterm) -> kress::Split {
    if (i == j) {
      const double l2 = -(std::log(0.5 * k * mesh.speed[j]) + kEulerGamma) / (2.0 * kPi);
      return {-1.0 / (4.0 * kPi), cplx(l2, 0.25)};
    }
    const double r = (mesh.nodes[i] - mesh.nodes[j]).norm();
    const double l1 = -std::cyl_bessel_j(0.0, k * r) / (4.0 * kPi);
    return {l1, specfun::green0(2, k, r) - l1 * logterm};
  });
  const Space s = boundary_space(mesh);
  return {std::move(M), s, s};
}

/// Single-layer operator with the Laplace kernel E = -(1/2pi) ln|x - y|.
inline BoundaryOperator assemble_E(const BoundaryMesh& mesh) {
  CMatrix M = kress::assemble(mesh, [&](int i, int j, double logterm) -> kress::Split {
    if (i == j) return {-1.0 / (4.0 * kPi), -std::log(mesh.speed[j]) / (2.0 * kPi)};
    const double r2 = (mesh.nodes[i] - mesh.nodes[j]).squaredNorm();
    return {-1.0 / (4.0 * kPi), -(std::log(r2) - logterm) / (4.0 * kPi)};
  });
  const Space s = boundary_space(mesh);
  return {std::move(M), s, s};
}

/// W(k) = Re G0 - E + (1/2pi)(ln(k/2) + gamma) <1, .> 1, assembled from its
/// own kernel so that small-k values do not suffer cancellation.
inline BoundaryOperator assemble_W(const BoundaryMesh& mesh, double k) {
  if (!(k > 0.0)) throw DomainError("assemble_W: wavenumber must be positive");
  CMatrix M = kress::assemble(mesh, [&](int i, int j, double logterm) -> kress::Split {
    if (i == j) return {0.0, 0.0};
    const double r = (mesh.nodes[i] - mesh.nodes[j]).norm();
    const double l1 = specfun::one_minus_j0(k * r) / (4.0 * kPi);
    return {l1, specfun::green0_regular_part(2, k, r) - l1 * logterm};
  });
  const Space s = boundary_space(mesh);
  return {std::move(M), s, s};
}

/// Double-layer operator with kernel dG0(x, y)/dnu_y.
inline BoundaryOperator assemble_double_layer(const BoundaryMesh& mesh, double k) {
  CMatrix M = kress::assemble(mesh, [&](int i, int j, double logterm) -> kress::Split {
    if (i == j) return {0.0, -mesh.curvature[j] / (4.0 * kPi)};
    const Vec2 diff = mesh.nodes[i] - mesh.nodes[j];
    const double r = diff.norm();
    const double cosine = diff.dot(mesh.normals[j]) / r;
    const double l1 = -k / (4.0 * kPi) * std::cyl_bessel_j(1.0, k * r) * cosine;
    const cplx kern = 0.25 * kI * k * specfun::hankel1(1.0, k * r) * cosine;
    return {l1, kern - l1 * logterm};
  });
  const Space s = boundary_space(mesh);
  return {std::move(M), s, s};
}

/// T(k): Dirichlet data on the boundary -> sqrt(k) times the far-field
/// pattern of the radiating exterior solution. The exterior problem is
/// solved with the combined-field ansatz u = (D - i eta S) phi, eta = k.
inline BoundaryOperator assemble_T(const BoundaryMesh& mesh, double k, const DirectionGrid& dirs) {
  const int n = mesh.size();
  const double eta = k;
  const BoundaryOperator S = assemble_G0(mesh, k);
  const BoundaryOperator D = assemble_double_layer(mesh, k);
  CMatrix A = 0.5 * CMatrix::Identity(n, n) + D.matrix - kI * eta * S.matrix;

  const cplx pre = std::sqrt(k) * c2(2, k);
  CMatrix F(dirs.size(), n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < dirs.size(); ++i) {
      const Vec2& th = dirs.dirs[i];
      const double phase = -k * th.dot(mesh.nodes[j]);
      F(i, j) = pre * (-kI * k * th.dot(mesh.normals[j]) - kI * eta) * std::exp(cplx(0.0, phase)) * mesh.weights[j];
    }
  }
  Eigen::PartialPivLU<CMatrix> lu(A);
  if (lu.rcond() < 1e-12) throw PreconditionError("assemble_T: combined-field system is singular");
  // T = F A^{-1}, i.e. T^T = A^{-T} F^T.
  const CMatrix Ft = F.transpose();
  CMatrix Tm = lu.transpose().solve(Ft);
  Tm.transposeInPlace();
  return {std::move(Tm), boundary_space(mesh), sphere_space(dirs)};
}

/// Q(k) = Im G0(k)^{-1}, computed by inverting the assembled single layer.
inline BoundaryOperator assemble_Q(const BoundaryOperator& G0, double max_cond = 1e10) {
  const BoundaryOperator inv =
      inverse(G0, max_cond, "Dirichlet eigenvalue: G0 is numerically singular, use the factorized form -T*T");
  return {inv.matrix.imag().cast<cplx>(), inv.domain, inv.range};
}

inline BoundaryOperator assemble_Q(const BoundaryMesh& mesh, double k) { return assemble_Q(assemble_G0(mesh, k)); }

/// T G T*.
inline BoundaryOperator assemble_Gv_tilde(const BoundaryOperator& T, const BoundaryOperator& G) {
  if (T.domain != G.range || T.domain != G.domain) {
    throw SpaceMismatch("assemble_Gv_tilde: T and G act on different boundary spaces");
  }
  return T * G * T.adjoint();
}

/// S = Id - 2i Gt*.
inline BoundaryOperator scattering_matrix(const BoundaryOperator& Gt) {
  if (Gt.domain != Gt.range) throw SpaceMismatch("scattering_matrix: operator must act on one space");
  return BoundaryOperator::identity(Gt.domain) - cplx(0.0, 2.0) * Gt.adjoint();
}

/// Coefficient of e^{in t} in A e^{in t} for an operator diagonal in the
/// Fourier basis (circle meshes and uniform direction grids).
inline cplx fourier_eigenvalue(const BoundaryOperator& A, int n) {
  const int nd = A.cols(), nr = A.rows();
  CVector e(nd), f(nr);
  for (int j = 0; j < nd; ++j) e[j] = std::exp(cplx(0.0, 2.0 * kPi * n * j / nd));
  for (int j = 0; j < nr; ++j) f[j] = std::exp(cplx(0.0, 2.0 * kPi * n * j / nr));
  const CVector Ae = A.matrix * e;
  cplx num = 0.0;
  double den = 0.0;
  for (int j = 0; j < nr; ++j) {
    num += Ae[j] * std::conj(f[j]) * A.range.weights[j];
    den += A.range.weights[j];
  }
  return num / den;
}

/// Closed-form Fourier eigenvalues on the circle of radius R.
namespace circle {

inline cplx g0(double k, double R, int n) {
  const double z = k * R;
  return cplx(0.0, kPi * R / 2.0) * std::cyl_bessel_j(std::abs(n), z) * specfun::hankel1(std::abs(n), z);
}

inline cplx t(double k, double R, int n) {
  const double a = std::abs(n) * kPi / 2.0 + kPi / 4.0;
  return std::sqrt(2.0 / kPi) * std::exp(cplx(0.0, -a)) / specfun::hankel1(std::abs(n), k * R);
}

inline double q(double k, double R, int n) {
  const specfun::BesselPair p = specfun::bessel_jy(std::abs(n), k * R);
  return -2.0 / (kPi * R * (p.j * p.j + p.y * p.y));
}

/// Eigenvalue of T G0 T*: |t_n|^2 lambda_n(G0) / R = i J / (J - i Y).
inline cplx g0_tilde(double k, double R, int n) {
  const specfun::BesselPair p = specfun::bessel_jy(std::abs(n), k * R);
  return kI * p.j / cplx(p.j, -p.y);
}

inline cplx s(double k, double R, int n) {
  const cplx H = specfun::hankel1(std::abs(n), k * R);
  return -std::conj(H) / H;
}

inline double e(double R, int n) { return n == 0 ? -R * std::log(R) : R / (2.0 * std::abs(n)); }

inline double w(double k, double R, int n) {
  const specfun::BesselPair p = specfun::bessel_jy(std::abs(n), k * R);
  double val = -kPi * R / 2.0 * p.j * p.y - e(R, n);
  if (n == 0) val += R * (std::log(0.5 * k) + kEulerGamma);
  return val;
}

}  // namespace circle

/// Orders l >= 0 with J_l(kR) = 0 up to `tol` for l <= kR (the Dirichlet
/// eigenvalue screen on the disk).
inline std::vector<int> circle_dirichlet_witnesses(double k, double R, double tol = 1e-8) {
  std::vector<int> out;
  for (int l = 0; l <= static_cast<int>(k * R) + 1; ++l) {
    if (std::abs(std::cyl_bessel_j(l, k * R)) < tol) out.push_back(l);
  }
  return out;
}

}  // namespace imgreen
