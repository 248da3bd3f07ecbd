#pragma once

// Joint diagonalization of (At, Bt), recovery of |lambda_A| from lambda_B,
// sign resolution against the negative eigenspace of a reference operator,
// and Tikhonov lifting from the direction circle back to the boundary.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "imgreen/boundary_operator.hpp"
#include "imgreen/errors.hpp"
#include "imgreen/forward.hpp"
#include "imgreen/lippmann_schwinger.hpp"

namespace imgreen {

struct SpectralOptions {
  double tol_cluster = 1e-8;      // relative to ||Bt||
  double commutator_tol = 1e-6;   // relative to ||At|| ||Bt||
  double eps_circle = 1e-6;       // admissible excursion of lambda_B outside [0, 1]
  double eps_spec = 1e-10;        // relative spectral floor
  double margin_min = 0.05;       // sign margins below this raise a warning
  double tail_floor = 1e-6;       // |lambda_A| below this: sign +, margin not used
};

/// Hermitian matrix (in orthonormal coordinates) of the real or imaginary part.
inline CMatrix hermitian_normalized(const BoundaryOperator& A) {
  const CMatrix n = A.normalized();
  return 0.5 * (n + n.adjoint());
}

/// Makes the first component with modulus above 1e-8 real and positive.
inline void fix_phase(Eigen::Ref<CVector> u) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) > 1e-8) {
      u *= std::conj(u[i]) / std::abs(u[i]);
      return;
    }
  }
}

struct SpectralDecomposition {
  RVector eigenvalues_B;          // descending
  RVector eigenvalues_A;          // aligned; Rayleigh quotients of At (or reconstructed)
  CMatrix vectors;                // orthonormal columns in normalized coordinates
  std::vector<int> cluster;       // cluster id per eigenpair
  int num_clusters = 0;
  Space space;

  int size() const { return static_cast<int>(eigenvalues_B.size()); }

  /// Eigenvector i as nodal values, orthonormal in the weighted product.
  CVector eigenvector(int i) const {
    return space.weights.cwiseSqrt().cwiseInverse().asDiagonal() * vectors.col(i);
  }
};

namespace detail {

/// Eigendecomposition of a Hermitian matrix, descending, with clusters of
/// eigenvalues closer than `tol`.
inline SpectralDecomposition hermitian_clusters(const CMatrix& nb, double tol, const Space& space) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(nb);
  const int n = static_cast<int>(nb.rows());
  SpectralDecomposition dec;
  dec.space = space;
  dec.eigenvalues_B.resize(n);
  dec.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    dec.eigenvalues_B[i] = es.eigenvalues()[n - 1 - i];
    dec.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  dec.cluster.assign(n, 0);
  int c = 0;
  for (int i = 1; i < n; ++i) {
    if (dec.eigenvalues_B[i - 1] - dec.eigenvalues_B[i] > tol) ++c;
    dec.cluster[i] = c;
  }
  dec.num_clusters = n > 0 ? c + 1 : 0;
  dec.eigenvalues_A = RVector::Zero(n);
  return dec;
}

}  // namespace detail

/// Diagonalizes Bt, then At within each Bt-eigenvalue cluster. Ordering is
/// lambda_B descending, then lambda_A descending.
inline SpectralDecomposition joint_diagonalize(const BoundaryOperator& At, const BoundaryOperator& Bt,
                                               const SpectralOptions& opt = {}) {
  if (At.domain != Bt.domain || At.range != Bt.range || At.domain != At.range) {
    throw SpaceMismatch("joint_diagonalize: operators act on different spaces");
  }
  const CMatrix na = hermitian_normalized(At);
  const CMatrix nb = hermitian_normalized(Bt);
  const double norm_a = At.norm(), norm_b = Bt.norm();
  if (norm_a > 0.0 && norm_b > 0.0) {
    Eigen::BDCSVD<CMatrix> svd(na * nb - nb * na);
    if (svd.singularValues()(0) > opt.commutator_tol * norm_a * norm_b) {
      throw PreconditionError("operators not simultaneously diagonalizable at this resolution");
    }
  }
  SpectralDecomposition dec = detail::hermitian_clusters(nb, opt.tol_cluster * norm_b, Bt.domain);
  const int n = dec.size();
  int start = 0;
  while (start < n) {
    int end = start;
    while (end < n && dec.cluster[end] == dec.cluster[start]) ++end;
    const int len = end - start;
    const CMatrix P = dec.vectors.middleCols(start, len);
    const CMatrix local = P.adjoint() * na * P;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (local + local.adjoint()));
    for (int i = 0; i < len; ++i) {
      dec.vectors.col(start + i) = P * es.eigenvectors().col(len - 1 - i);
      dec.eigenvalues_A[start + i] = es.eigenvalues()[len - 1 - i];
    }
    start = end;
  }
  for (int i = 0; i < n; ++i) fix_phase(dec.vectors.col(i));
  return dec;
}

/// |lambda_A| = sqrt(lambda_B - lambda_B^2) after clamping lambda_B to [0, 1].
inline double magnitude_from_imag(double lambda_b, double eps_circle = 1e-6) {
  if (lambda_b < -eps_circle || lambda_b > 1.0 + eps_circle || std::isnan(lambda_b)) {
    throw PreconditionError("magnitude_from_imag: lambda_B = " + std::to_string(lambda_b) +
                            " outside [0, 1]; the circle identity is violated");
  }
  const double b = std::clamp(lambda_b, 0.0, 1.0);
  return std::sqrt(std::max(0.0, b - b * b));
}

/// Count of eigenvalues of the (Hermitian part of) `op` below -eps ||op||.
inline int inertia_rank(const BoundaryOperator& op, double eps_spec = 1e-10) {
  const CMatrix h = hermitian_normalized(op);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  int count = 0;
  for (double l : es.eigenvalues()) count += l < -eps_spec * scale;
  return count;
}

struct ReferenceInertia {
  CMatrix basis;                 // orthonormal columns, normalized coordinates
  RVector negative_eigenvalues;
  int rank = 0;
  double source_k = 0.0;
  std::string source_v0;
};

/// Negative eigenspace of Re Gt_{v0}.
inline ReferenceInertia reference_inertia_from_tilde(const BoundaryOperator& Gt_v0, double k, std::string v0_desc,
                                                     double eps_spec = 1e-10) {
  const CMatrix h = hermitian_normalized(Gt_v0.re());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<int> neg;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()[i] < -eps_spec * scale) neg.push_back(i);
  }
  ReferenceInertia ref;
  ref.rank = static_cast<int>(neg.size());
  ref.basis.resize(h.rows(), ref.rank);
  ref.negative_eigenvalues.resize(ref.rank);
  for (int j = 0; j < ref.rank; ++j) {
    ref.basis.col(j) = es.eigenvectors().col(neg[j]);
    ref.negative_eigenvalues[j] = es.eigenvalues()[neg[j]];
  }
  ref.source_k = k;
  ref.source_v0 = std::move(v0_desc);
  return ref;
}

/// Checks that Re G_{v0} is injective at this resolution (smallest
/// |eigenvalue| above `floor` times the largest).
inline void check_boundary_injectivity(const BoundaryOperator& Gv0, double floor = 1e-8) {
  const CMatrix h = hermitian_normalized(Gv0.re());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  const RVector a = es.eigenvalues().cwiseAbs();
  if (a.minCoeff() <= floor * a.maxCoeff()) {
    throw PreconditionError("reference violates injectivity assumption (Re G_v0 has a near-zero eigenvalue)");
  }
}

inline ReferenceInertia reference_inertia(const Potential& v0, const BoundaryMesh& mesh, const VolumeGrid& grid,
                                          double k, const DirectionGrid& dirs, double eps_spec = 1e-10) {
  const BoundaryOperator Gv0 = assemble_Gv(mesh, grid, v0, k);
  check_boundary_injectivity(Gv0);
  const BoundaryOperator T = assemble_T(mesh, k, dirs);
  return reference_inertia_from_tilde(assemble_Gv_tilde(T, Gv0), k, v0.description, eps_spec);
}

struct SignAssignment {
  RVector lambda_A;              // signed magnitudes
  RVector distance;              // d(f, L_-)
  RVector margin;                // |d - 1/2|
  std::vector<bool> tail;        // |lambda_A| below the floor; sign fixed to +
  std::vector<std::string> warnings;
  double min_margin = 0.5;       // over non-tail eigenpairs
};

/// sign(lambda_A) = - iff d(f, L_-) < 1/2, with |lambda_A| from lambda_B.
inline SignAssignment assign_signs(const SpectralDecomposition& dec, const ReferenceInertia& ref,
                                   const SpectralOptions& opt = {}) {
  const int n = dec.size();
  SignAssignment out;
  out.lambda_A.resize(n);
  out.distance.resize(n);
  out.margin.resize(n);
  out.tail.assign(n, false);
  for (int i = 0; i < n; ++i) {
    const double mag = magnitude_from_imag(dec.eigenvalues_B[i], opt.eps_circle);
    const CVector f = dec.vectors.col(i) / dec.vectors.col(i).norm();
    const CVector resid = ref.rank > 0 ? CVector(f - ref.basis * (ref.basis.adjoint() * f)) : f;
    const double d = resid.norm();
    out.distance[i] = d;
    out.margin[i] = std::abs(d - 0.5);
    if (mag < opt.tail_floor) {
      out.tail[i] = true;
      out.lambda_A[i] = mag;
      continue;
    }
    out.lambda_A[i] = d < 0.5 ? -mag : mag;
    out.min_margin = std::min(out.min_margin, out.margin[i]);
    if (out.margin[i] < opt.margin_min) {
      out.warnings.push_back("sign assignment fragile for eigenpair " + std::to_string(i) +
                             " (margin " + std::to_string(out.margin[i]) + "): v too far from reference");
    }
  }
  return out;
}

/// Operator sum_i lambda_i f_i f_i* from a decomposition and signed values.
inline BoundaryOperator assemble_from_spectrum(const SpectralDecomposition& dec, const RVector& lambda) {
  const CMatrix n = dec.vectors * lambda.cast<cplx>().asDiagonal() * dec.vectors.adjoint();
  return BoundaryOperator::from_normalized(n, dec.space, dec.space);
}

struct Reconstruction {
  BoundaryOperator A_tilde;
  SpectralDecomposition dec;
  SignAssignment signs;
};

/// At from Bt alone: eigenbasis of Bt, magnitudes from the circle identity,
/// signs from the reference negative eigenspace. Signs must agree within
/// every Bt cluster.
inline Reconstruction reconstruct_A_tilde(const BoundaryOperator& Bt, const ReferenceInertia& ref,
                                          const SpectralOptions& opt = {}) {
  if (Bt.domain != Bt.range) throw SpaceMismatch("reconstruct_A_tilde: Bt must act on one space");
  if (ref.basis.rows() != Bt.cols()) throw SpaceMismatch("reconstruct_A_tilde: reference basis size mismatch");
  Reconstruction out;
  out.dec = detail::hermitian_clusters(hermitian_normalized(Bt), opt.tol_cluster * Bt.norm(), Bt.domain);
  for (int i = 0; i < out.dec.size(); ++i) fix_phase(out.dec.vectors.col(i));
  out.signs = assign_signs(out.dec, ref, opt);
  for (int i = 1; i < out.dec.size(); ++i) {
    if (out.dec.cluster[i] != out.dec.cluster[i - 1] || out.signs.tail[i] || out.signs.tail[i - 1]) continue;
    if ((out.signs.lambda_A[i] < 0.0) != (out.signs.lambda_A[i - 1] < 0.0)) {
      throw PreconditionError("inconsistent signs inside B-eigenvalue cluster " + std::to_string(out.dec.cluster[i]) +
                              " (lambda_B = " + std::to_string(out.dec.eigenvalues_B[i]) + ")");
    }
  }
  out.dec.eigenvalues_A = out.signs.lambda_A;
  out.A_tilde = assemble_from_spectrum(out.dec, out.signs.lambda_A);
  return out;
}

/// Solves T X T* = Y for X by Tikhonov-regularized least squares in the
/// singular basis of T (penalty alpha ||X||^2, alpha relative to
/// sigma_max^4), then symmetrizes X.
inline BoundaryOperator lift_to_boundary(const BoundaryOperator& Y, const BoundaryOperator& T, double alpha) {
  if (Y.domain != T.range || Y.range != T.range) throw SpaceMismatch("lift_to_boundary: Y must act on the range of T");
  if (alpha < 0.0) throw DomainError("lift_to_boundary: alpha must be non-negative");
  Eigen::BDCSVD<CMatrix> svd(T.normalized(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) throw PreconditionError("lift_to_boundary: T vanishes");
  if (alpha == 0.0 && s(s.size() - 1) < 1e-14 * s(0)) {
    throw PreconditionError("lift_to_boundary: alpha = 0 with rank-deficient T");
  }
  const double a = alpha * std::pow(s(0), 4);
  const CMatrix& U = svd.matrixU();
  const CMatrix& V = svd.matrixV();
  const CMatrix Yp = U.adjoint() * Y.normalized() * U;
  CMatrix Z(Yp.rows(), Yp.cols());
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
      const double ss = s(i) * s(j);
      Z(i, j) = ss * Yp(i, j) / (ss * ss + a);
    }
  }
  CMatrix X = V * Z * V.adjoint();
  X = 0.5 * (X + X.transpose()).eval();
  return BoundaryOperator::from_normalized(X, T.domain, T.domain);
}

}  // namespace imgreen
