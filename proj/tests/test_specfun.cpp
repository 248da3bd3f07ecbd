#include <cmath>

#include <gtest/gtest.h>

#include "imgreen/lippmann_schwinger.hpp"
#include "imgreen/specfun.hpp"

using namespace imgreen;
using namespace imgreen::specfun;

namespace {

// Reference values computed with mpmath at 30 digits.
struct Frozen {
  double nu, z, j, y;
};

double modulus(double nu, double z) {
  const BesselPair p = bessel_jy(nu, z);
  return std::hypot(p.j, p.y);
}

}  // namespace

TEST(Bessel, MatchesFrozenValues) {
  const double j0_1 = 0.76519768655796655145, y0_1 = 0.088256964215676957983;
  EXPECT_NEAR(bessel_jy(0, 1.0).j, j0_1, 1e-14);
  EXPECT_NEAR(bessel_jy(0, 1.0).y, y0_1, 1e-14);
  EXPECT_NEAR(bessel_jy(1, 2.5).j, 0.49709410246427403801, 1e-14);
  EXPECT_NEAR(bessel_jy(3, 7.0).y, 0.26808060304231508345, 1e-14);
  EXPECT_NEAR(bessel_jy(5, 0.3).j / 6.3044326337710711158e-7, 1.0, 1e-12);
  EXPECT_NEAR(bessel_jy(2.5, 3.0).j, 0.41271003220971599344, 1e-14);
  EXPECT_NEAR(bessel_jy(1.5, 0.7).y, -1.6563541503977834683, 1e-13);
  EXPECT_NEAR(bessel_jy(20, 50.0).j, -0.11670435275957973734, 1e-12 * modulus(20, 50.0));
  EXPECT_NEAR(bessel_jy(0, 80.0).y, -0.055620339089770000037, 1e-12 * modulus(0, 80.0));
}

TEST(Bessel, WronskianHolds) {
  for (double z : {0.1, 0.9, 3.3, 12.0, 17.5, 60.0}) {
    for (int n : {0, 1, 4, 9}) {
      const BesselPair a = bessel_jy(n, z), b = bessel_jy(n + 1, z);
      const double w = b.j * a.y - a.j * b.y;
      EXPECT_NEAR(w * kPi * z / 2.0, 1.0, 1e-11) << "n=" << n << " z=" << z;
    }
  }
}

TEST(Bessel, SmallArgumentSeriesOracle) {
  // J0 from its power series, summed independently.
  for (double z : {0.05, 0.4, 1.7}) {
    double term = 1.0, sum = 1.0;
    for (int m = 1; m < 40; ++m) {
      term *= -(z * z / 4.0) / (static_cast<double>(m) * m);
      sum += term;
    }
    EXPECT_NEAR(bessel_jy(0, z).j, sum, 1e-15);
  }
}

TEST(Bessel, HalfIntegerOrderIsSphericalClosedForm) {
  const double z = 2.2;
  EXPECT_NEAR(bessel_jy(0.5, z).j, std::sqrt(2.0 / (kPi * z)) * std::sin(z), 1e-15);
  EXPECT_NEAR(bessel_jy(0.5, z).y, -std::sqrt(2.0 / (kPi * z)) * std::cos(z), 1e-15);
}

TEST(Bessel, RejectsInvalidArguments) {
  EXPECT_THROW(bessel_jy(0, 0.0), DomainError);
  EXPECT_THROW(bessel_jy(0, -1.0), DomainError);
  EXPECT_THROW(bessel_jy(0.3, 1.0), DomainError);
  EXPECT_THROW(spherical_jy(-1, 1.0), DomainError);
}

TEST(Green, ThreeDimensionalClosedForm) {
  const cplx g = green0(3, 2.0, 0.7);
  EXPECT_NEAR(g.real(), 0.019322222111271349242, 1e-15);
  EXPECT_NEAR(g.imag(), 0.11202799692588357467, 1e-15);
}

TEST(Green, TwoDimensionalFrozen) {
  const cplx g = green0(2, 2.0, 0.7);
  EXPECT_NEAR(g.real(), -0.084473782419922031307, 1e-14);
  EXPECT_NEAR(g.imag(), 0.14171378009357218034, 1e-14);
}

TEST(Green, RejectsBadInput) {
  EXPECT_THROW(green0(4, 1.0, 1.0), DomainError);
  EXPECT_THROW(green0(2, 1.0, 0.0), DomainError);
  EXPECT_THROW(green0(2, 0.0, 1.0), DomainError);
  EXPECT_THROW(green0_expansion(2, 2.0, 0.6), DomainError);
}

TEST(Green, ExpansionMatchesDirectEvaluation) {
  for (int d : {2, 3}) {
    for (double r : {0.05, 0.3, 0.9}) {
      const double k = 1.0;
      const Green0Expansion e = green0_expansion(d, k, r);
      const cplx g = green0(d, k, r);
      EXPECT_NEAR(e.im_value, g.imag(), 1e-14);
      const double expect = d == 2 ? g.real() - laplace_E(2, r) + (std::log(0.5 * k) + kEulerGamma) / (2.0 * kPi)
                                   : g.real() - laplace_E(3, r);
      EXPECT_NEAR(e.re_regular, expect, 1e-13) << "d=" << d << " r=" << r;
    }
  }
}

TEST(Green, ExpansionLimitsAtZero) {
  EXPECT_NEAR(green0_expansion(2, 1.3, 0.0).im_value, 0.25, 1e-16);
  EXPECT_NEAR(green0_expansion(3, 1.3, 0.0).im_value, 1.3 / (4.0 * kPi), 1e-16);
  EXPECT_NEAR(green0_expansion(2, 1.3, 0.0).re_regular, 0.0, 1e-16);
}

TEST(Laplace, FundamentalSolution) {
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * kPi / 3.0, 1e-14);
  EXPECT_NEAR(laplace_E(3, 2.0), 1.0 / (8.0 * kPi), 1e-16);
  EXPECT_NEAR(laplace_E(2, std::exp(1.0)), -1.0 / (2.0 * kPi), 1e-16);
}

TEST(Laplace, OneMinusJ0IsAccurateForTinyArguments) {
  EXPECT_NEAR(one_minus_j0(1e-5) / 2.5e-11, 1.0, 1e-9);
  EXPECT_NEAR(one_minus_j0(3.0), 1.0 - std::cyl_bessel_j(0.0, 3.0), 1e-15);
}

TEST(SelfCell, LogIntegralMatchesQuadrature) {
  // k = 2 exp(-gamma) removes the constant log term, leaving the log integral
  // of -(1/2pi) ln r over the square plus i h^2 / 4.
  const double h = 1.0 / 18.0;
  const cplx s = self_cell_integral(2.0 * std::exp(-kEulerGamma), h);
  EXPECT_NEAR(s.real(), 0.001941074899130837891, 1e-15);
  EXPECT_NEAR(s.imag(), h * h / 4.0, 1e-17);
}
