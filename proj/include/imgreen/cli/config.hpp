#pragma once

// ExperimentConfig: the JSON schema of the imgreen command-line tool. Every
// object is checked for unknown keys before any computation starts.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "imgreen/errors.hpp"
#include "imgreen/geometry.hpp"
#include "imgreen/potentials.hpp"

namespace imgreen::cli {

using json = nlohmann::json;

/// Reads fields of one JSON object and remembers which keys were used.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError("'" + display() + "' must be an object");
  }

  bool has(const std::string& key) const { return j_->contains(key); }

  template <typename T>
  T get(const std::string& key, std::optional<T> fallback = std::nullopt) {
    seen_.insert(key);
    if (!j_->contains(key)) {
      if (fallback) return *fallback;
      throw ConfigError("missing key '" + qualify(key) + "'");
    }
    try {
      return (*j_)[key].get<T>();
    } catch (const json::exception&) {
      throw ConfigError("key '" + qualify(key) + "' has the wrong type");
    }
  }

  const json& child(const std::string& key) {
    seen_.insert(key);
    if (!j_->contains(key)) throw ConfigError("missing key '" + qualify(key) + "'");
    return (*j_)[key];
  }

  std::string qualify(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  /// Throws on the first key that was never read.
  void finish() const {
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + qualify(it.key()) + "'");
    }
  }

 private:
  std::string display() const { return path_.empty() ? "<root>" : path_; }

  const json* j_;
  std::string path_;
  std::set<std::string> seen_;
};

struct GeometryConfig {
  std::string kind = "circle";
  double radius = 1.0;                          // circle radius or star scale
  std::vector<std::pair<int, double>> coeffs;   // star cosine coefficients
};

struct DiscretizationConfig {
  int n = 64;          // boundary nodes
  int m = 0;           // directions (0: same as n)
  double h = 1.0 / 18.0;
  double data_h = 0.0; // data grid for inversions (0: h / 2)
  int coarse = 12;
};

struct AcousticConfig {
  double rho_c = 1.0;
  double kappa_c = 1.0;
  double rho_amplitude = 0.2;     // amplitude of the bump in rho^{-1/2}
  double kappa_amplitude = 0.3;   // amplitude of the bump in kappa
  std::vector<double> omegas{0.7, 1.3};
};

struct ScanConfig {
  bool eigenphase = false;
  double k_lo = 0.5, k_hi = 1.5;
  int k_steps = 50;
  bool omega_zero = false;
  double M = 2.0;
  double omega_lo = 0.1, omega_hi = 1.5;
  int omega_steps = 14, bisections = 12;
  bool w_decay = false;
  double w_k_lo = 1e-3, w_k_hi = 1e-1;
  int w_samples = 9;
};

struct ExperimentConfig {
  GeometryConfig geometry;
  std::vector<PotentialSpec> potentials;
  PotentialSpec reference{"zero", 0.0};
  std::optional<AcousticConfig> acoustic;
  std::vector<double> wavenumbers{1.0};
  DiscretizationConfig discretization;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 0;
  bool record_timing = false;

  // command options
  bool refine = false;
  std::string mode = "full";      // invert: full | helmholtz | acoustic
  double alpha = 1e-8;
  double lift_alpha = 1e-8;
  int max_iter = 15;
  int modes = 8;                  // disk-analytic
  ScanConfig scan;

  double tol(const std::string& key) const { return tolerances.at(key); }
};

inline const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"identity", 1e-6},      {"circle_law", 1e-4},     {"unitarity", 4e-4}, {"stone", 1e-3},
      {"reciprocity", 1e-3},   {"symmetry", 1e-8},       {"reconstruction", 1e-3},
      {"recovery", 0.15},      {"margin", 0.25},         {"injectivity", 1e-10}};
  return t;
}

inline const std::set<std::string>& known_commands() {
  static const std::set<std::string> c{"verify", "spectrum", "reconstruct", "invert", "scan", "disk-analytic"};
  return c;
}

inline PotentialSpec parse_potential(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  PotentialSpec p;
  p.family = r.get<std::string>("family");
  p.amplitude = r.get<double>("amplitude", 0.0);
  r.finish();
  static const std::set<std::string> families{"zero", "gaussian", "bump", "two_bump", "subdisk", "random"};
  if (!families.count(p.family)) throw ConfigError("key '" + r.qualify("family") + "': unknown family '" + p.family + "'");
  return p;
}

inline ExperimentConfig parse_config(const json& root) {
  ExperimentConfig c;
  ObjectReader r(root, "");

  {
    ObjectReader g(r.child("geometry"), "geometry");
    c.geometry.kind = g.get<std::string>("kind");
    if (c.geometry.kind == "circle") {
      c.geometry.radius = g.get<double>("radius", 1.0);
    } else if (c.geometry.kind == "star") {
      c.geometry.radius = g.get<double>("scale", 1.0);
      for (const auto& pair : g.get<std::vector<std::vector<double>>>("coeffs", std::vector<std::vector<double>>{})) {
        if (pair.size() != 2) throw ConfigError("key 'geometry.coeffs' entries must be [order, amplitude]");
        c.geometry.coeffs.emplace_back(static_cast<int>(pair[0]), pair[1]);
      }
    } else {
      throw ConfigError("key 'geometry.kind': unknown geometry kind '" + c.geometry.kind + "' (circle | star)");
    }
    g.finish();
    if (!(c.geometry.radius > 0.0)) throw ConfigError("key 'geometry.radius' must be positive");
  }

  if (r.has("potentials")) {
    const json& list = r.child("potentials");
    if (!list.is_array()) throw ConfigError("key 'potentials' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      c.potentials.push_back(parse_potential(list[i], "potentials[" + std::to_string(i) + "]"));
    }
  }
  if (r.has("corpus")) {
    ObjectReader cr(r.child("corpus"), "corpus");
    const double scale = cr.get<double>("scale", 1.0);
    cr.finish();
    for (const auto& p : test_corpus(scale)) c.potentials.push_back(p);
  }
  if (r.has("reference")) c.reference = parse_potential(r.child("reference"), "reference");

  if (r.has("acoustic")) {
    ObjectReader a(r.child("acoustic"), "acoustic");
    AcousticConfig ac;
    ac.rho_c = a.get<double>("rho_c", 1.0);
    ac.kappa_c = a.get<double>("kappa_c", 1.0);
    ac.rho_amplitude = a.get<double>("rho_amplitude", 0.2);
    ac.kappa_amplitude = a.get<double>("kappa_amplitude", 0.3);
    ac.omegas = a.get<std::vector<double>>("omegas", std::vector<double>{0.7, 1.3});
    a.finish();
    if (!(ac.rho_c > 0.0) || !(ac.kappa_c > 0.0)) throw ConfigError("key 'acoustic.rho_c/kappa_c' must be positive");
    if (ac.omegas.size() != 2) throw ConfigError("key 'acoustic.omegas' must hold two frequencies");
    c.acoustic = ac;
  }

  c.wavenumbers = r.get<std::vector<double>>("wavenumbers", std::vector<double>{1.0});
  for (double k : c.wavenumbers) {
    if (!(k > 0.0)) throw ConfigError("key 'wavenumbers' entries must be positive");
  }

  if (r.has("discretization")) {
    ObjectReader d(r.child("discretization"), "discretization");
    c.discretization.n = d.get<int>("n", 64);
    c.discretization.m = d.get<int>("m", 0);
    c.discretization.h = d.get<double>("h", 1.0 / 18.0);
    c.discretization.data_h = d.get<double>("data_h", 0.0);
    c.discretization.coarse = d.get<int>("coarse", 12);
    d.finish();
    if (c.discretization.n < 8 || c.discretization.n % 2) throw ConfigError("key 'discretization.n' must be even and >= 8");
    if (c.discretization.m < 0 || c.discretization.m % 2) throw ConfigError("key 'discretization.m' must be even");
    if (!(c.discretization.h > 0.0)) throw ConfigError("key 'discretization.h' must be positive");
    if (c.discretization.coarse < 2) throw ConfigError("key 'discretization.coarse' must be >= 2");
  }
  if (c.discretization.m == 0) c.discretization.m = c.discretization.n;
  if (c.discretization.data_h == 0.0) c.discretization.data_h = 0.5 * c.discretization.h;

  c.tolerances = default_tolerances();
  if (r.has("tolerances")) {
    const json& t = r.child("tolerances");
    if (!t.is_object()) throw ConfigError("key 'tolerances' must be an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (!c.tolerances.count(it.key())) throw ConfigError("unknown key 'tolerances." + it.key() + "'");
      if (!it.value().is_number()) throw ConfigError("key 'tolerances." + it.key() + "' must be a number");
      c.tolerances[it.key()] = it.value().get<double>();
    }
  }

  c.seed = r.get<std::uint64_t>("seed", 0);
  c.record_timing = r.get<bool>("record_timing", false);

  if (r.has("options")) {
    ObjectReader o(r.child("options"), "options");
    c.refine = o.get<bool>("refine", false);
    c.mode = o.get<std::string>("mode", std::string("full"));
    if (c.mode != "full" && c.mode != "helmholtz" && c.mode != "acoustic") {
      throw ConfigError("key 'options.mode': unknown mode '" + c.mode + "' (full | helmholtz | acoustic)");
    }
    c.alpha = o.get<double>("alpha", 1e-8);
    c.lift_alpha = o.get<double>("lift_alpha", 1e-8);
    c.max_iter = o.get<int>("max_iter", 15);
    c.modes = o.get<int>("modes", 8);
    if (o.has("eigenphase")) {
      ObjectReader e(o.child("eigenphase"), "options.eigenphase");
      c.scan.eigenphase = true;
      c.scan.k_lo = e.get<double>("k_lo", 0.5);
      c.scan.k_hi = e.get<double>("k_hi", 1.5);
      c.scan.k_steps = e.get<int>("steps", 50);
      e.finish();
    }
    if (o.has("omega_zero")) {
      ObjectReader e(o.child("omega_zero"), "options.omega_zero");
      c.scan.omega_zero = true;
      c.scan.M = e.get<double>("M", 2.0);
      c.scan.omega_lo = e.get<double>("omega_lo", 0.1);
      c.scan.omega_hi = e.get<double>("omega_hi", 1.5);
      c.scan.omega_steps = e.get<int>("steps", 14);
      c.scan.bisections = e.get<int>("bisections", 12);
      e.finish();
    }
    if (o.has("w_decay")) {
      ObjectReader e(o.child("w_decay"), "options.w_decay");
      c.scan.w_decay = true;
      c.scan.w_k_lo = e.get<double>("k_lo", 1e-3);
      c.scan.w_k_hi = e.get<double>("k_hi", 1e-1);
      c.scan.w_samples = e.get<int>("samples", 9);
      e.finish();
    }
    o.finish();
  }
  r.finish();
  return c;
}

inline BoundaryMesh build_mesh(const GeometryConfig& g, int n) {
  if (g.kind == "circle") return make_circle(g.radius, n);
  return make_star(g.radius, g.coeffs, n);
}

}  // namespace imgreen::cli
