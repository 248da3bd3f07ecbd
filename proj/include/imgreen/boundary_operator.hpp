#pragma once

// Dense operators between weighted L^2 spaces on the boundary mesh or on the
// direction circle. Matrices act on nodal values; adjoints and norms are
// taken in the weighted inner products <u, w> = sum_j u_j conj(w_j) q_j.

#include <string>

#include <Eigen/SVD>

#include "imgreen/errors.hpp"
#include "imgreen/types.hpp"

namespace imgreen {

struct Space {
  enum class Kind { boundary, sphere };
  Kind kind = Kind::boundary;
  RVector weights;

  int size() const { return static_cast<int>(weights.size()); }
  std::string name() const { return kind == Kind::boundary ? "L2(boundary)" : "L2(sphere)"; }

  bool operator==(const Space& o) const {
    return kind == o.kind && weights.size() == o.weights.size() && weights == o.weights;
  }
  bool operator!=(const Space& o) const { return !(*this == o); }
};

inline Space boundary_space(const RVector& w) { return {Space::Kind::boundary, w}; }
inline Space sphere_space(const RVector& w) { return {Space::Kind::sphere, w}; }

struct BoundaryOperator {
  CMatrix matrix;
  Space domain;
  Space range;

  BoundaryOperator() = default;
  BoundaryOperator(CMatrix m, Space dom, Space ran)
      : matrix(std::move(m)), domain(std::move(dom)), range(std::move(ran)) {
    if (matrix.rows() != range.size() || matrix.cols() != domain.size()) {
      throw SpaceMismatch("operator matrix shape does not match its spaces");
    }
  }

  int rows() const { return static_cast<int>(matrix.rows()); }
  int cols() const { return static_cast<int>(matrix.cols()); }

  /// A* = W_dom^{-1} A^H W_ran.
  BoundaryOperator adjoint() const {
    CMatrix m = domain.weights.cwiseInverse().asDiagonal() * matrix.adjoint() * range.weights.asDiagonal();
    return {std::move(m), range, domain};
  }

  /// Entrywise complex conjugate (the operator with conjugated kernel).
  BoundaryOperator conjugate() const { return {matrix.conjugate(), domain, range}; }

  /// W_ran^{1/2} A W_dom^{-1/2}: the matrix of A in orthonormal coordinates.
  CMatrix normalized() const {
    return range.weights.cwiseSqrt().asDiagonal() * matrix * domain.weights.cwiseSqrt().cwiseInverse().asDiagonal();
  }

  static BoundaryOperator from_normalized(const CMatrix& n, const Space& dom, const Space& ran) {
    CMatrix m = ran.weights.cwiseSqrt().cwiseInverse().asDiagonal() * n * dom.weights.cwiseSqrt().asDiagonal();
    return {std::move(m), dom, ran};
  }

  /// (A + A*)/2 and (A - A*)/(2i). For a weighted-symmetric kernel these
  /// are the operators with kernels Re K and Im K.
  BoundaryOperator re() const { return combine(*this, adjoint(), 0.5, 0.5); }
  BoundaryOperator im() const { return combine(*this, adjoint(), cplx(0.0, -0.5), cplx(0.0, 0.5)); }

  /// Weighted spectral norm.
  double norm() const {
    if (matrix.size() == 0) return 0.0;
    Eigen::BDCSVD<CMatrix> svd(normalized());
    return svd.singularValues()(0);
  }

  BoundaryOperator operator+(const BoundaryOperator& o) const { return combine(*this, o, 1.0, 1.0); }
  BoundaryOperator operator-(const BoundaryOperator& o) const { return combine(*this, o, 1.0, -1.0); }

  BoundaryOperator operator*(const BoundaryOperator& o) const {
    if (domain != o.range) {
      throw SpaceMismatch("cannot compose: domain " + domain.name() + " does not match range " + o.range.name());
    }
    return {matrix * o.matrix, o.domain, range};
  }

  BoundaryOperator operator*(cplx s) const { return {matrix * s, domain, range}; }

  static BoundaryOperator identity(const Space& s) {
    return {CMatrix::Identity(s.size(), s.size()), s, s};
  }

  static BoundaryOperator combine(const BoundaryOperator& a, const BoundaryOperator& b, cplx ca, cplx cb) {
    if (a.domain != b.domain || a.range != b.range) {
      throw SpaceMismatch("cannot add operators on different spaces");
    }
    return {ca * a.matrix + cb * b.matrix, a.domain, a.range};
  }
};

inline BoundaryOperator operator*(cplx s, const BoundaryOperator& a) { return a * s; }

/// Inverse of an operator between spaces of equal dimension; throws when the
/// normalized matrix has condition number above `max_cond`.
inline BoundaryOperator inverse(const BoundaryOperator& a, double max_cond, const std::string& what) {
  Eigen::BDCSVD<CMatrix> svd(a.normalized(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || !(s(s.size() - 1) > 0.0) || s(0) / s(s.size() - 1) > max_cond) {
    throw PreconditionError(what);
  }
  CMatrix ninv = svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
  return BoundaryOperator::from_normalized(ninv, a.range, a.domain);
}

/// Weighted spectral norm of a - b relative to the norm of `ref`.
inline double relative_distance(const BoundaryOperator& a, const BoundaryOperator& b, const BoundaryOperator& ref) {
  const double r = ref.norm();
  return r > 0.0 ? (a - b).norm() / r : (a - b).norm();
}

/// Weighted-symmetry residual ||A - A^T_w|| / ||A||, with the transpose taken
/// in the bilinear pairing sum_j u_j w_j q_j (equal spaces only).
inline double symmetry_residual(const BoundaryOperator& a) {
  const CMatrix n = a.normalized();
  const double nn = a.norm();
  if (nn == 0.0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(n - n.transpose());
  return svd.singularValues()(0) / nn;
}

}  // namespace imgreen
