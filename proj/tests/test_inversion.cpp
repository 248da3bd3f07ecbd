#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "imgreen/inversion.hpp"

using namespace imgreen;

namespace {

struct Small {
  BoundaryMesh mesh = make_circle(1.0, 32);
  VolumeGrid grid = make_grid(mesh, 1.0 / 12);
  CoarseBasis basis = make_coarse_basis(mesh, grid, 8);
  double k = 2.0;

  RVector random_params(double amp, std::uint64_t seed) const {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RVector p(basis.num_params());
    for (int q = 0; q < p.size(); ++q) p[q] = amp * u(eng);
    return p;
  }
};

}  // namespace

TEST(CoarseBasis, ProjectInvertsExpand) {
  const Small s;
  ASSERT_GT(s.basis.num_params(), 10);
  const RVector p = s.random_params(1.0, 3);
  EXPECT_LT((s.basis.project(s.basis.expand(p, s.grid.size())) - p).norm(), 1e-14);
  EXPECT_LT(coarse_relative_error(s.basis, p, s.basis.expand(p, s.grid.size())), 1e-14);
}

TEST(Inversion, ExactInitialGuessNeedsNoCorrection) {
  const Small s;
  const Potential v = s.basis.expand(s.random_params(0.05, 5), s.grid.size());
  const BoundaryOperator G = assemble_Gv(s.mesh, s.grid, v, s.k);
  const InversionResult r = recover_v(G, s.mesh, s.grid, s.basis, v, s.k);
  EXPECT_LT((r.coefficients - s.basis.project(v)).norm(), 1e-10 * s.basis.project(v).norm());
  EXPECT_LT(r.relative_data_residual, 1e-8);
  EXPECT_TRUE(r.converged);
}

TEST(Inversion, BornRegimeOneStep) {
  const Small s;
  const RVector p = s.random_params(1e-4, 9);
  const Potential v = s.basis.expand(p, s.grid.size());
  const BoundaryOperator G = assemble_Gv(s.mesh, s.grid, v, s.k);
  InversionOptions opt;
  opt.max_iter = 1;
  opt.alpha = 1e-12;
  const Potential zero = sample_potential(s.grid, [](const Vec2&) { return 0.0; });
  const InversionResult r = recover_v(G, s.mesh, s.grid, s.basis, zero, s.k, opt);
  EXPECT_LT((r.coefficients - p).norm() / p.norm(), 0.01);
}

TEST(Inversion, JacobianMatchesFiniteDifferences) {
  const Small s;
  const CoarseForward fwd(s.mesh, s.grid, s.basis, s.k);
  const RVector p = s.random_params(0.1, 13);
  const RVector dir = s.random_params(1.0, 17);
  RMatrix J;
  const RVector f0 = fwd.flatten(fwd.remainder(p, &J));
  const RVector lin = J * dir;
  double prev = 0.0;
  for (double eps : {1e-3, 5e-4}) {
    const RVector f1 = fwd.flatten(fwd.remainder(p + eps * dir));
    const double e = (f1 - f0 - eps * lin).norm();
    EXPECT_LT((f1 - f0).norm() / (eps * lin.norm()), 1.0 + 1e-2);
    EXPECT_GT((f1 - f0).norm() / (eps * lin.norm()), 1.0 - 1e-2);
    if (prev > 0.0) {
      EXPECT_NEAR(std::log2(prev / e), 2.0, 0.1);
    }
    prev = e;
  }
}

TEST(Inversion, RecoversSmoothPotentialFromFinerData) {
  const Small s;
  const VolumeGrid fine = make_grid(s.mesh, 1.0 / 24);
  const Field f = family_field({"gaussian", 0.1}, inner_radius(s.mesh));
  const BoundaryOperator G = assemble_Gv(s.mesh, fine, sample_potential(fine, f), s.k);
  const Potential zero = sample_potential(s.grid, [](const Vec2&) { return 0.0; });
  const InversionResult r = recover_v(G, s.mesh, s.grid, s.basis, zero, s.k);
  EXPECT_LT(coarse_relative_error(s.basis, r.coefficients, sample_potential(s.grid, f)), 0.2);
  EXPECT_LT(r.relative_data_residual, 0.05);
}

TEST(Inversion, RejectsDataOnWrongSpace) {
  const Small s;
  const BoundaryMesh other = make_circle(1.0, 16);
  const Potential zero = sample_potential(s.grid, [](const Vec2&) { return 0.0; });
  EXPECT_THROW(recover_v(assemble_G0(other, s.k), s.mesh, s.grid, s.basis, zero, s.k), SpaceMismatch);
}

TEST(Helmholtz, PotentialAndKappaRoundTrip) {
  const Small s;
  const Potential kappa = sample_potential(s.grid, [](const Vec2& x) { return 1.0 + 0.3 * std::exp(-x.squaredNorm()); });
  const Potential back = helmholtz_kappa(helmholtz_potential(kappa, 0.3), 0.3);
  EXPECT_LT((back.values - kappa.values).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Helmholtz, LargeFrequencyIsRejected) {
  const Small s;
  const DirectionGrid dirs = make_directions(32);
  const BoundaryOperator G0 = assemble_G0(s.mesh, 3.0);
  EXPECT_THROW(helmholtz_small_freq_recover(G0, s.mesh, s.grid, s.basis, 3.0, dirs), PreconditionError);
}

TEST(Helmholtz, OmegaZeroIsPositive) {
  const Small s;
  const OmegaZeroScan sc = scan_omega_zero(s.mesh, s.grid, 2.0, 0.1, 1.5, 14, 6, make_directions(32));
  EXPECT_GT(sc.omega0, 0.0);
  EXPECT_GT(sc.first_failure, sc.omega0);
  EXPECT_LT(sc.first_failure - sc.omega0, 0.1 / 32 + 1e-12);
}

TEST(Pipeline, RejectsNonHermitianData) {
  const Small s;
  const DirectionGrid dirs = make_directions(32);
  const Potential zero = sample_potential(s.grid, [](const Vec2&) { return 0.0; });
  const BoundaryOperator G0 = assemble_G0(s.mesh, s.k);
  EXPECT_THROW(imag_only_recover_v(G0, s.mesh, s.grid, s.basis, zero, s.k, dirs), PreconditionError);
}
