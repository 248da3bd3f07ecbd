#pragma once

// Bessel/Hankel functions, the free outgoing Green function and the Laplace
// fundamental solution, with the small-argument splittings used by the
// singular quadratures.

#include <cmath>
#include <string>

#include "imgreen/errors.hpp"
#include "imgreen/types.hpp"

namespace imgreen::specfun {

struct BesselPair {
  double j;  ///< J_nu(z)
  double y;  ///< Y_nu(z)
};

namespace detail {

inline bool is_integer_order(double nu) { return nu >= 0.0 && std::floor(nu) == nu; }

inline bool is_half_integer_order(double nu) {
  return nu > 0.0 && std::floor(nu - 0.5) == nu - 0.5;
}

}  // namespace detail

/// Spherical Bessel functions j_l, y_l. j_0 and y_0 use their closed forms.
inline BesselPair spherical_jy(int l, double z) {
  if (!(z > 0.0)) throw DomainError("spherical_jy: argument must be positive, got " + std::to_string(z));
  if (l < 0) throw DomainError("spherical_jy: negative order");
  if (l == 0) return {std::sin(z) / z, -std::cos(z) / z};
  return {std::sph_bessel(static_cast<unsigned>(l), z), std::sph_neumann(static_cast<unsigned>(l), z)};
}

/// Bessel functions of the first and second kind for integer orders and for
/// the half-integer orders l + 1/2 (closed forms through j_l, y_l).
inline BesselPair bessel_jy(double nu, double z) {
  if (!(z > 0.0)) throw DomainError("bessel_jy: argument must be positive, got " + std::to_string(z));
  if (detail::is_integer_order(nu)) {
    return {std::cyl_bessel_j(nu, z), std::cyl_neumann(nu, z)};
  }
  if (detail::is_half_integer_order(nu)) {
    const int l = static_cast<int>(nu - 0.5);
    const double scale = std::sqrt(2.0 * z / kPi);
    const BesselPair s = spherical_jy(l, z);
    return {scale * s.j, scale * s.y};
  }
  throw DomainError("bessel_jy: unsupported order " + std::to_string(nu));
}

/// H^{(1)}_nu(z) = J_nu(z) + i Y_nu(z).
inline cplx hankel1(double nu, double z) {
  const BesselPair p = bessel_jy(nu, z);
  return {p.j, p.y};
}

inline double green_order(int d) { return 0.5 * d - 1.0; }

inline void check_dimension(int d) {
  if (d != 2 && d != 3) throw DomainError("dimension must be 2 or 3, got " + std::to_string(d));
}

/// Outgoing free-space Green function of -Delta - k^2,
/// G(r) = (i/4) (k / (2 pi r))^nu H^{(1)}_nu(k r), nu = d/2 - 1.
inline cplx green0(int d, double k, double r) {
  check_dimension(d);
  if (!(k > 0.0)) throw DomainError("green0: wavenumber must be positive");
  if (!(r > 0.0)) throw DomainError("green0: singular point r = 0 (use green0_expansion)");
  const double nu = green_order(d);
  const double prefactor = nu == 0.0 ? 1.0 : std::pow(k / (2.0 * kPi * r), nu);
  return 0.25 * kI * prefactor * hankel1(nu, k * r);
}

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// Fundamental solution of -Delta: -(1/2pi) ln r for d = 2, r^{2-d}/(d(d-2)omega_d) otherwise.
inline double laplace_E(int d, double r) {
  if (d < 2) throw DomainError("laplace_E: dimension must be >= 2");
  if (!(r > 0.0)) throw DomainError("laplace_E: singular point r = 0");
  if (d == 2) return -std::log(r) / (2.0 * kPi);
  return std::pow(r, 2.0 - d) / (d * (d - 2.0) * unit_ball_volume(d));
}

struct Green0Expansion {
  /// Re G0 - E(r) (d = 3) or Re G0 - E(r) + (ln(k/2) + gamma)/(2 pi) (d = 2).
  double re_regular;
  /// Im G0 from its entire series.
  double im_value;
};

/// Series evaluation of Im G0 and of the regular remainder of Re G0 for
/// k r <= 1. Both are entire in r; r = 0 returns the limits.
inline Green0Expansion green0_expansion(int d, double k, double r) {
  check_dimension(d);
  if (!(k > 0.0)) throw DomainError("green0_expansion: wavenumber must be positive");
  if (r < 0.0) throw DomainError("green0_expansion: negative distance");
  const double z = k * r;
  if (z > 1.0) throw DomainError("green0_expansion: requires k r <= 1");
  const double q = 0.25 * z * z;  // (z/2)^2

  // Im G0 = (1/4) (k^2/(4pi))^nu sum_m (-1)^m (z/2)^{2m} / (m! Gamma(m+nu+1))
  const double nu = green_order(d);
  double im_sum = 0.0;
  double term = 1.0 / std::tgamma(nu + 1.0);
  for (int m = 0; m < 30; ++m) {
    im_sum += term;
    term *= -q / ((m + 1.0) * (m + 1.0 + nu));
    if (std::abs(term) < 1e-18 * std::abs(im_sum)) break;
  }
  const double im_value = 0.25 * std::pow(k * k / (4.0 * kPi), nu) * im_sum;

  double re_regular = 0.0;
  if (d == 2) {
    // (1/2pi)(ln(z/2)+gamma)(1 - J0(z)) - (1/2pi) sum_{m>=1} (-1)^{m+1} H_m q^m/(m!)^2
    double one_minus_j0 = 0.0;
    double harmonic_sum = 0.0;
    double t = 1.0;
    double harmonic = 0.0;
    for (int m = 1; m < 30; ++m) {
      t *= -q / (static_cast<double>(m) * m);
      harmonic += 1.0 / m;
      one_minus_j0 -= t;
      harmonic_sum += -t * harmonic;  // (-1)^{m+1} q^m/(m!)^2 = -t
      if (std::abs(t) < 1e-18) break;
    }
    if (z > 0.0) re_regular = (std::log(0.5 * z) + kEulerGamma) * one_minus_j0 / (2.0 * kPi);
    re_regular -= harmonic_sum / (2.0 * kPi);
  } else {
    // (cos z - 1)/(4 pi r) = (k/(4pi)) sum_{m>=1} (-1)^m z^{2m-1}/(2m)!
    double t = 1.0;  // z^{2m}/(2m)! with sign
    double s = 0.0;
    for (int m = 1; m < 30; ++m) {
      t *= -z * z / ((2.0 * m - 1.0) * (2.0 * m));
      if (z > 0.0) s += t / z;
      if (std::abs(t) < 1e-18) break;
    }
    re_regular = k * s / (4.0 * kPi);
  }
  return {re_regular, im_value};
}

/// 1 - J0(z) without cancellation for small z.
inline double one_minus_j0(double z) {
  if (z > 1.0) return 1.0 - std::cyl_bessel_j(0.0, z);
  const double q = 0.25 * z * z;
  double t = 1.0, s = 0.0;
  for (int m = 1; m < 30; ++m) {
    t *= -q / (static_cast<double>(m) * m);
    s -= t;
    if (std::abs(t) < 1e-18 * std::abs(s)) break;
  }
  return s;
}

/// Regular remainder of Re G0 for any r >= 0: series for k r <= 1, closed
/// form otherwise. For d = 2 this is the kernel of W(k).
inline double green0_regular_part(int d, double k, double r) {
  if (k * r <= 1.0) return green0_expansion(d, k, r).re_regular;
  if (d == 2) {
    return green0(2, k, r).real() - laplace_E(2, r) + (std::log(0.5 * k) + kEulerGamma) / (2.0 * kPi);
  }
  return green0(d, k, r).real() - laplace_E(d, r);
}

}  // namespace imgreen::specfun
