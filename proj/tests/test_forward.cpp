#include <cmath>

#include <gtest/gtest.h>

#include "imgreen/forward.hpp"

using namespace imgreen;

namespace {

double max_mode_error(const BoundaryOperator& A, int modes, const std::function<cplx(int)>& exact) {
  double worst = 0.0;
  for (int q = -modes; q <= modes; ++q) {
    const cplx e = exact(q);
    worst = std::max(worst, std::abs(fourier_eigenvalue(A, q) - e) / std::abs(e));
  }
  return worst;
}

}  // namespace

TEST(Circle, ClosedFormsMatchFrozenValues) {
  // (i pi R/2) J_n H_n and t_n at k = R = 1 from mpmath.
  const double g0[4][2] = {{-0.10608219815307811436, 0.91974444547346406613},
                           {0.53999761635765072498, 0.30417609760108051755},
                           {0.29793165759568581687, 0.020738926785755309845},
                           {0.17889549552989013254, 0.00060118273993884723476}};
  const double t[4][2] = {{0.6437082345547718796, -0.81155671152587865899},
                          {0.23942167424813541406, -0.85706124283297588129},
                          {-0.36382079395578967793, -0.31646623298411868404},
                          {-0.096587745424432632539, 0.097239105353194745363}};
  for (int n = 0; n < 4; ++n) {
    EXPECT_NEAR(circle::g0(1.0, 1.0, n).real(), g0[n][0], 1e-14);
    EXPECT_NEAR(circle::g0(1.0, 1.0, n).imag(), g0[n][1], 1e-14);
    EXPECT_NEAR(circle::t(1.0, 1.0, n).real(), t[n][0], 1e-14);
    EXPECT_NEAR(circle::t(1.0, 1.0, n).imag(), t[n][1], 1e-14);
  }
}

TEST(Circle, SingleLayerReproducesFourierEigenvalues) {
  const BoundaryMesh m = make_circle(1.0, 128);
  const BoundaryOperator G0 = assemble_G0(m, 1.0);
  EXPECT_LT(max_mode_error(G0, 32, [](int q) { return circle::g0(1.0, 1.0, q); }), 1e-8);
}

TEST(Circle, FarFieldMapMatchesClosedForm) {
  const BoundaryMesh m = make_circle(1.0, 128);
  const DirectionGrid d = make_directions(128);
  const BoundaryOperator T = assemble_T(m, 1.0, d);
  const double nt = T.norm();
  double worst = 0.0;
  for (int q = -64; q < 64; ++q) {
    worst = std::max(worst, std::abs(fourier_eigenvalue(T, q) - circle::t(1.0, 1.0, q)) / nt);
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Circle, QEqualsMinusTStarT) {
  const BoundaryMesh m = make_circle(1.0, 128);
  const DirectionGrid d = make_directions(128);
  const BoundaryOperator T = assemble_T(m, 1.0, d);
  const BoundaryOperator Q = assemble_Q(m, 1.0);
  const BoundaryOperator R = -1.0 * (T.adjoint() * T);
  EXPECT_LT(relative_distance(Q, R, Q), 1e-6);
  EXPECT_NEAR(fourier_eigenvalue(Q, 2).real(), circle::q(1.0, 1.0, 2), 1e-9);
}

TEST(Circle, LaplaceAndRegularPartsMatchClosedForms) {
  const BoundaryMesh m = make_circle(1.3, 128);
  const BoundaryOperator E = assemble_E(m);
  const BoundaryOperator W = assemble_W(m, 0.7);
  for (int q = 0; q <= 8; ++q) {
    EXPECT_NEAR(fourier_eigenvalue(E, q).real(), circle::e(1.3, q), 1e-12) << q;
    EXPECT_NEAR(fourier_eigenvalue(W, q).real(), circle::w(0.7, 1.3, q), 1e-12) << q;
  }
}

TEST(Circle, TildeAndScatteringEigenvalues) {
  const BoundaryMesh m = make_circle(1.0, 64);
  const DirectionGrid d = make_directions(64);
  const BoundaryOperator T = assemble_T(m, 1.5, d);
  const BoundaryOperator Gt = assemble_Gv_tilde(T, assemble_G0(m, 1.5));
  const BoundaryOperator S = scattering_matrix(Gt);
  for (int q = 0; q <= 6; ++q) {
    EXPECT_LT(std::abs(fourier_eigenvalue(Gt, q) - circle::g0_tilde(1.5, 1.0, q)), 1e-10) << q;
    EXPECT_LT(std::abs(fourier_eigenvalue(S, q) - circle::s(1.5, 1.0, q)), 1e-10) << q;
  }
}

TEST(Star, FarFieldOfInteriorPointSource) {
  const BoundaryMesh m = make_star(1.0, {{3, 0.2}}, 96);
  const DirectionGrid d = make_directions(96);
  const double k = 2.0;
  const Vec2 y0(0.2, -0.1);
  const BoundaryOperator T = assemble_T(m, k, d);
  CVector f(m.size());
  for (int j = 0; j < m.size(); ++j) f[j] = specfun::green0(2, k, (m.nodes[j] - y0).norm());
  const CVector Tf = T.matrix * f;
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < d.size(); ++i) {
    const cplx exact = std::sqrt(k) * c2(2, k) * std::exp(cplx(0.0, -k * d.dirs[i].dot(y0)));
    worst = std::max(worst, std::abs(Tf[i] - exact));
    scale = std::max(scale, std::abs(exact));
  }
  EXPECT_LT(worst / scale, 1e-10);
}

TEST(Star, SingleLayerIsSymmetricAndConverges) {
  const auto mode = [](int n) {
    const BoundaryMesh m = make_star(1.0, {{3, 0.2}}, n);
    const BoundaryOperator G = assemble_G0(m, 1.2);
    CVector one = CVector::Ones(n);
    return (one.transpose() * m.weights.asDiagonal() * G.matrix * one)(0);
  };
  EXPECT_LT(std::abs(mode(64) - mode(128)), 1e-10);
  const BoundaryMesh m = make_star(1.0, {{3, 0.2}}, 64);
  EXPECT_LT(symmetry_residual(assemble_G0(m, 1.2)), 1e-12);
}

TEST(Forward, DirichletEigenvalueMakesQSingular) {
  const BoundaryMesh m = make_circle(1.0, 64);
  EXPECT_THROW(assemble_Q(m, 2.4048255576957727686), PreconditionError);
  const auto w = circle_dirichlet_witnesses(2.4048255576957727686, 1.0);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0], 0);
}

TEST(Forward, CompositionChecksSpaces) {
  const BoundaryMesh m = make_circle(1.0, 32);
  const DirectionGrid d = make_directions(16);
  const BoundaryOperator T = assemble_T(m, 1.0, d);
  EXPECT_THROW(T * T, SpaceMismatch);
  EXPECT_NO_THROW(T.adjoint() * T);
}

TEST(Forward, ConstantsForDimensionThree) {
  EXPECT_NEAR(c1(3, 2.0 * kPi), 1.0 / (8.0 * kPi), 1e-16);
  EXPECT_NEAR(std::abs(c2(3, 1.0)), 1.0 / (4.0 * kPi), 1e-16);
}
