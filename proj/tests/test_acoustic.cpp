#include <cmath>

#include <gtest/gtest.h>

#include "imgreen/acoustic.hpp"

using namespace imgreen;

TEST(Acoustic, DiscreteRoundTrip) {
  const BoundaryMesh mesh = make_star(1.0, {{3, 0.15}}, 64);
  const VolumeGrid grid = make_grid(mesh, 1.0 / 20);
  const ManufacturedMedium med;
  const AcousticModel truth = med.sample(grid);
  const auto [v1, k1] = acoustic_to_schrodinger(truth, grid, 0.7);
  const auto [v2, k2] = acoustic_to_schrodinger(truth, grid, 1.3);
  EXPECT_DOUBLE_EQ(k1, 0.7);
  const AcousticModel rec = recover_acoustic(v1, 0.7, v2, 1.3, med.rho_c, med.kappa_c, mesh, grid);
  EXPECT_LT((rec.rho.values - truth.rho.values).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((rec.kappa.values - truth.kappa.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Acoustic, ConstantDensityGivesBackground) {
  const BoundaryMesh mesh = make_circle(1.0, 64);
  const VolumeGrid grid = make_grid(mesh, 1.0 / 16);
  const Potential q = sample_potential(grid, [](const Vec2&) { return 0.0; });
  const Potential rho = recover_density(q, 2.0, mesh, grid);
  EXPECT_LT((rho.values.array() - 2.0).abs().maxCoeff(), 1e-12);
}

TEST(Acoustic, SecondOrderConvergence) {
  const ManufacturedMedium med;
  for (const BoundaryMesh& mesh : {make_circle(1.0, 64), make_star(1.0, {{3, 0.15}}, 64)}) {
    const AcousticConvergence c = acoustic_convergence(med, mesh, 1.0 / 20, 3, 0.7, 1.3);
    EXPECT_GE(c.rho_slope, 1.8);
    EXPECT_GE(c.kappa_slope, 1.8);
  }
}

TEST(Acoustic, DisentangleIsLinear) {
  const BoundaryMesh mesh = make_circle(1.0, 32);
  const VolumeGrid grid = make_grid(mesh, 1.0 / 10);
  const Potential a = sample_potential(grid, [](const Vec2& x) { return x.x(); });
  const Potential b = sample_potential(grid, [](const Vec2& x) { return x.y() * x.y(); });
  Potential s;
  s.values = 2.0 * a.values + 3.0 * b.values;
  const Disentangled da = two_frequency_disentangle(a, 0.5, b, 1.0, 1.0, 1.0);
  const Disentangled ds = two_frequency_disentangle(s, 0.5, s, 1.0, 1.0, 1.0);
  // q of identical potentials equals the potential; m equals rho_c kappa_c.
  EXPECT_LT((ds.q.values - s.values).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((ds.m.values.array() - 1.0).abs().maxCoeff(), 1e-14);
  const Potential r = recombine(da, 0.5, 1.0, 1.0);
  EXPECT_LT((r.values - a.values).cwiseAbs().maxCoeff(), 1e-14);
  const Potential r2 = recombine(da, 1.0, 1.0, 1.0);
  EXPECT_LT((r2.values - b.values).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Acoustic, RejectsBadInput) {
  const BoundaryMesh mesh = make_circle(1.0, 32);
  const VolumeGrid grid = make_grid(mesh, 1.0 / 10);
  const Potential z = sample_potential(grid, [](const Vec2&) { return 0.0; });
  EXPECT_THROW(two_frequency_disentangle(z, 1.0, z, 1.0, 1.0, 1.0), DomainError);
  AcousticModel m;
  m.rho = sample_potential(grid, [](const Vec2& x) { return x.x(); });
  m.kappa = z;
  EXPECT_THROW(acoustic_to_schrodinger(m, grid, 1.0), DomainError);
}
