#pragma once

// Named analytic potential families and the fixed test corpus.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "imgreen/errors.hpp"
#include "imgreen/geometry.hpp"

namespace imgreen {

using Field = std::function<double(const Vec2&)>;

/// C^2 compactly supported bump amp (1 - |x-c|^2/s^2)^3 on |x - c| < s.
inline Field bump(double amp, Vec2 center, double support) {
  return [=](const Vec2& x) {
    const double q = (x - center).squaredNorm() / (support * support);
    if (q >= 1.0) return 0.0;
    const double t = 1.0 - q;
    return amp * t * t * t;
  };
}

/// Gaussian amp exp(-|x-c|^2 / (2 sigma^2)) cut off at |x - c| = cutoff.
inline Field truncated_gaussian(double amp, Vec2 center, double sigma, double cutoff) {
  return [=](const Vec2& x) {
    const double q = (x - center).squaredNorm();
    if (q >= cutoff * cutoff) return 0.0;
    return amp * std::exp(-q / (2.0 * sigma * sigma));
  };
}

inline Field disk_indicator(double amp, Vec2 center, double radius) {
  return [=](const Vec2& x) { return (x - center).squaredNorm() < radius * radius ? amp : 0.0; };
}

inline Field sum_fields(Field a, Field b) {
  return [=](const Vec2& x) { return a(x) + b(x); };
}

/// Uniform double in [0, 1) from the raw engine output, so sequences do not
/// depend on the standard library's distribution implementation.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Sum of `count` bumps with seeded random centers and signed amplitudes.
inline Field random_bumps(double amp, double inner_radius, int count, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  Field f = [](const Vec2&) { return 0.0; };
  for (int i = 0; i < count; ++i) {
    const double rad = 0.5 * inner_radius * std::sqrt(uniform01(eng));
    const double ang = 2.0 * kPi * uniform01(eng);
    const double a = amp * (2.0 * uniform01(eng) - 1.0);
    f = sum_fields(f, bump(a, Vec2(rad * std::cos(ang), rad * std::sin(ang)), 0.3 * inner_radius));
  }
  return f;
}

/// Radius of the largest origin-centered disk inside the mesh.
inline double inner_radius(const BoundaryMesh& mesh) {
  double r = std::numeric_limits<double>::infinity();
  for (const Vec2& p : mesh.nodes) r = std::min(r, p.norm());
  return r;
}

struct PotentialSpec {
  std::string family;   // zero, gaussian, two_bump, subdisk, bump, random
  double amplitude = 0.0;

  std::string name() const;
};

inline std::string format_amplitude(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", a);
  return buf;
}

inline std::string PotentialSpec::name() const {
  return family == "zero" ? family : family + "(" + format_amplitude(amplitude) + ")";
}

/// Analytic field for a named family. Supports are scaled by the inner
/// radius of the domain so they stay well inside it.
inline Field family_field(const PotentialSpec& spec, double rin, std::uint64_t seed = 0) {
  const double a = spec.amplitude;
  if (spec.family == "zero") return [](const Vec2&) { return 0.0; };
  if (spec.family == "gaussian") {
    return truncated_gaussian(a, Vec2(0.1 * rin, -0.05 * rin), 0.2 * rin, 0.6 * rin);
  }
  if (spec.family == "bump") return bump(a, Vec2(0.15 * rin, 0.1 * rin), 0.45 * rin);
  if (spec.family == "two_bump") {
    return sum_fields(bump(a, Vec2(-0.3 * rin, 0.2 * rin), 0.3 * rin),
                      bump(-0.6 * a, Vec2(0.35 * rin, -0.15 * rin), 0.25 * rin));
  }
  if (spec.family == "subdisk") return disk_indicator(a, Vec2(0.1 * rin, 0.15 * rin), 0.4 * rin);
  if (spec.family == "random") return random_bumps(a, rin, 3, seed);
  throw ConfigError("unknown potential family '" + spec.family + "'");
}

/// zero plus {gaussian, two_bump, subdisk} at amplitudes {0.5, 0.1, 0.01} * scale.
inline std::vector<PotentialSpec> test_corpus(double scale = 1.0) {
  std::vector<PotentialSpec> out{{"zero", 0.0}};
  for (const char* fam : {"gaussian", "two_bump", "subdisk"}) {
    for (double a : {0.5, 0.1, 0.01}) out.push_back({fam, a * scale});
  }
  return out;
}

}  // namespace imgreen
