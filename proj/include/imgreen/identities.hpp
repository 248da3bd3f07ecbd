#pragma once

// Residual checks for the one-frequency operator identities, the
// Kramers-Kronig relation, eigenphase tracking for the scattering matrix and
// the Bessel-condition injectivity test on the disk.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include "imgreen/boundary_operator.hpp"
#include "imgreen/errors.hpp"
#include "imgreen/forward.hpp"
#include "imgreen/geometry.hpp"
#include "imgreen/specfun.hpp"

namespace imgreen {

struct IdentityReport {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int mesh_size = 0;
  std::map<std::string, std::string> context;
};

inline IdentityReport make_report(std::string name, double residual, double tol, int mesh_size,
                                  std::map<std::string, std::string> context = {}) {
  IdentityReport r;
  r.name = std::move(name);
  r.residual = residual;
  r.tolerance = tol;
  r.pass = residual <= tol;
  r.mesh_size = mesh_size;
  r.context = std::move(context);
  return r;
}

inline double safe_ratio(double num, double den) { return den > 0.0 ? num / den : num; }

/// AQA + BQB = -B and AQB - BQA = 0.
inline std::pair<IdentityReport, IdentityReport> check_ABQ(const BoundaryOperator& A, const BoundaryOperator& B,
                                                           const BoundaryOperator& Q, double tol = 1e-6) {
  const double r1 = safe_ratio((A * Q * A + B * Q * B + B).norm(), B.norm());
  const double r2 = safe_ratio((A * Q * B - B * Q * A).norm(), A.norm() * Q.norm() * B.norm());
  return {make_report("AQA+BQB+B", r1, tol, A.cols()), make_report("AQB-BQA", r2, tol, A.cols())};
}

/// G_v^{-1} - conj(G_v)^{-1} = G_0^{-1} - conj(G_0)^{-1}.
inline IdentityReport check_GG0_invariance(const BoundaryOperator& Gv, const BoundaryOperator& G0, double tol = 1e-5,
                                           double max_cond = 1e10) {
  const auto lhs = [&](const BoundaryOperator& G) {
    return inverse(G, max_cond, "invariance check: singular operator") -
           inverse(G.conjugate(), max_cond, "invariance check: singular operator");
  };
  const BoundaryOperator X0 = lhs(G0);
  const double r = safe_ratio((lhs(Gv) - X0).norm(), X0.norm());
  return make_report("Gv^-1-conj(Gv)^-1=G0^-1-conj(G0)^-1", r, tol, Gv.cols());
}

/// At^2 = Bt - Bt^2 and At Bt = Bt At.
inline std::pair<IdentityReport, IdentityReport> check_tilde(const BoundaryOperator& At, const BoundaryOperator& Bt,
                                                             double tol = 1e-8) {
  const double nb = Bt.norm();
  const double r1 = safe_ratio((At * At - Bt + Bt * Bt).norm(), nb);
  const double r2 = safe_ratio((At * Bt - Bt * At).norm(), At.norm() * nb);
  return {make_report("At^2-Bt+Bt^2", r1, tol, At.cols()), make_report("AtBt-BtAt", r2, tol, At.cols())};
}

inline CVector eigenvalues(const BoundaryOperator& A) {
  Eigen::ComplexEigenSolver<CMatrix> es(A.normalized(), false);
  return es.eigenvalues();
}

/// max over eigenvalues of ||lambda - i/2| - 1/2|.
inline IdentityReport check_circle_law(const BoundaryOperator& Gt, double tol = 1e-4) {
  const CVector ev = eigenvalues(Gt);
  double worst = 0.0;
  for (const cplx& l : ev) worst = std::max(worst, std::abs(std::abs(l - cplx(0.0, 0.5)) - 0.5));
  return make_report("circle-law", worst, tol, Gt.cols());
}

/// ||S*S - I||.
inline IdentityReport check_unitarity(const BoundaryOperator& S, double tol = 4e-4) {
  const double r = (S.adjoint() * S - BoundaryOperator::identity(S.domain)).norm();
  return make_report("S*S-I", r, tol, S.cols());
}

/// ||Im G_v - c1 H H*|| / ||Im G_v||.
inline IdentityReport check_stone(const BoundaryOperator& ImGv, const BoundaryOperator& c1HH, double tol = 1e-3) {
  return make_report("ImGv-c1HH*", relative_distance(ImGv, c1HH, ImGv), tol, ImGv.cols());
}

/// R conj(H)* = T G_v / (sqrt(k) c2).
inline IdentityReport check_mixed_reciprocity(const BoundaryOperator& RHbar, const BoundaryOperator& T,
                                              const BoundaryOperator& Gv, double k, double tol = 1e-3) {
  const BoundaryOperator rhs = (1.0 / (std::sqrt(k) * c2(2, k))) * (T * Gv);
  return make_report("RconjH*-TGv/(sqrt(k)c2)", relative_distance(RHbar, rhs, RHbar), tol, Gv.cols());
}

/// Observed order log2(r(n)/r(2n)). A residual already at the roundoff
/// floor counts as converged.
struct ConvergenceCheck {
  double coarse = 0.0;
  double fine = 0.0;
  double order = 0.0;
  bool at_floor = false;
  bool pass = false;
};

inline ConvergenceCheck convergence_order(double r_n, double r_2n, double min_order = 2.0, double floor = 1e-10) {
  ConvergenceCheck c;
  c.coarse = r_n;
  c.fine = r_2n;
  c.order = (r_n > 0.0 && r_2n > 0.0) ? std::log2(r_n / r_2n) : 0.0;
  c.at_floor = r_2n <= floor;
  c.pass = c.at_floor || r_2n <= r_n / std::pow(2.0, min_order);
  return c;
}

// ---------------------------------------------------------------------------
// Kramers-Kronig

/// Composite 16-point Gauss-Legendre rule on panels of width <= `panel`.
inline double integrate_panels(const std::function<double(double)>& f, double a, double b, double panel) {
  if (!(b > a)) return 0.0;
  const int np = std::max(1, static_cast<int>(std::ceil((b - a) / panel)));
  const double w = (b - a) / np;
  double s = 0.0;
  for (int p = 0; p < np; ++p) {
    s += boost::math::quadrature::gauss<double, 16>::integrate(f, a + p * w, a + (p + 1) * w);
  }
  return s;
}

/// (1/pi) p.v. int_{-kmax}^{kmax} f(k') / (k' - k0) dk' for an odd f given
/// on k' > 0 by `im_positive`. The symmetric part about k0 is folded into
/// the regular integrand (f(k0+s) - f(k0-s))/s.
inline double kramers_kronig_pv(const std::function<double(double)>& im_positive, double k0, double kmax,
                                double panel) {
  if (!(k0 > 0.0) || !(kmax > 2.0 * k0)) throw DomainError("kramers_kronig: need 0 < 2 k0 < kmax");
  const auto f = [&](double kp) {
    if (kp > 0.0) return im_positive(kp);
    if (kp < 0.0) return -im_positive(-kp);
    return 0.0;
  };
  const double L = kmax - k0;
  const auto folded = [&](double s) { return (f(k0 + s) - f(k0 - s)) / s; };
  double total = integrate_panels(folded, 0.0, k0, panel) + integrate_panels(folded, k0, L, panel);
  // Leftover piece k' in [-kmax, -kmax + 2 k0).
  total += integrate_panels([&](double kp) { return f(kp) / (kp - k0); }, -kmax, -kmax + 2.0 * k0, panel);
  return total / kPi;
}

struct KramersKronigResult {
  IdentityReport report;
  double transform = 0.0;
  double reference = 0.0;
  double truncation_estimate = 0.0;
};

/// Checks Re G(k0) = (1/pi) p.v. int Im G(k')/(k'-k0) dk' for a pair of
/// points at distance r, with Im G supplied as a function of k' > 0.
inline KramersKronigResult check_kramers_kronig(const std::function<double(double)>& im_g, double re_g_k0, double r,
                                                double k0, double kmax, double tol) {
  if (!(r > 0.0)) throw DomainError("kramers_kronig: points must be distinct");
  const double panel = std::min(0.5, 0.5 / r);
  KramersKronigResult out;
  out.transform = kramers_kronig_pv(im_g, k0, kmax, panel);
  out.reference = re_g_k0;
  const double half = kramers_kronig_pv(im_g, k0, 0.5 * kmax, panel);
  out.truncation_estimate = std::abs(out.transform - half);
  const double res = safe_ratio(std::abs(out.transform - re_g_k0), std::abs(re_g_k0));
  out.report = make_report("kramers-kronig", res, tol, 0,
                           {{"note", "assumes empty discrete spectrum and no zero resonance (not checkable here)"}});
  return out;
}

/// Free-space case: Im G0 and Re G0 for d in {2, 3}.
inline KramersKronigResult check_kramers_kronig_free(int d, double r, double k0, double kmax, double tol) {
  if (!(r > 0.0)) throw DomainError("kramers_kronig: points must be distinct");
  const auto im = [d, r](double kp) { return specfun::green0(d, kp, r).imag(); };
  KramersKronigResult out = check_kramers_kronig(im, specfun::green0(d, k0, r).real(), r, k0, kmax, tol);
  out.report.context["d"] = std::to_string(d);
  return out;
}

// ---------------------------------------------------------------------------
// Eigenphases of S(k)

struct EigenphaseRow {
  double k = 0.0;
  int track = 0;
  cplx eigenvalue;
  double phase = 0.0;        // beta = -arg(s), unwrapped along the track
  double increment = 0.0;    // beta(k) - beta(k_prev); 0 at track start
  bool non_monotone = false;
  bool ambiguous = false;
};

struct EigenphaseScan {
  std::vector<EigenphaseRow> rows;
  int non_monotone = 0;
  int ambiguous = 0;
  int tracks = 0;
};

/// Tracks the eigenvalues s != 1 of S(k) = I - 2i (T G0 T*)* across a
/// wavenumber grid by maximal eigenvector overlap. Phase increments must be
/// positive; crossings are flagged, not resolved.
inline EigenphaseScan scan_eigenphases(const BoundaryMesh& mesh, double k_lo, double k_hi, int nk, int m = 0,
                                       double exclude = 1e-6, double mono_tol = 1e-10) {
  if (nk < 2 || !(k_hi > k_lo) || !(k_lo > 0.0)) throw DomainError("scan_eigenphases: bad wavenumber range");
  for (int j = 0; j < mesh.size(); ++j) {
    if (!(mesh.nodes[j].dot(mesh.normals[j]) > 0.0)) throw DomainError("scan_eigenphases: mesh is not starlike");
  }
  const DirectionGrid dirs = make_directions(m > 0 ? m : mesh.size());
  struct Track {
    int id;
    CVector vec;
    cplx s;
    double phase;
    bool alive;
  };
  std::vector<Track> tracks;
  EigenphaseScan out;
  for (int step = 0; step < nk; ++step) {
    const double k = k_lo + (k_hi - k_lo) * step / (nk - 1);
    const BoundaryOperator T = assemble_T(mesh, k, dirs);
    const BoundaryOperator S = scattering_matrix(assemble_Gv_tilde(T, assemble_G0(mesh, k)));
    Eigen::ComplexEigenSolver<CMatrix> es(S.normalized());
    std::vector<int> keep;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      if (std::abs(es.eigenvalues()[i] - 1.0) > exclude) keep.push_back(i);
    }
    std::vector<bool> used(es.eigenvalues().size(), false);
    std::vector<int> alive;
    for (std::size_t t = 0; t < tracks.size(); ++t) {
      if (tracks[t].alive) alive.push_back(static_cast<int>(t));
    }
    // Overlaps |<f_track, f_candidate>|, matched greedily by largest overlap.
    RMatrix ov(alive.size(), keep.size());
    for (std::size_t a = 0; a < alive.size(); ++a) {
      for (std::size_t c = 0; c < keep.size(); ++c) {
        ov(a, c) = std::abs(tracks[alive[a]].vec.dot(es.eigenvectors().col(keep[c])));
      }
    }
    std::vector<int> match(alive.size(), -1);
    for (std::size_t it = 0; it < std::min(alive.size(), keep.size()); ++it) {
      Eigen::Index a = 0, c = 0;
      const double best = ov.size() ? ov.maxCoeff(&a, &c) : 0.0;
      if (best < 0.5) break;
      match[a] = static_cast<int>(c);
      ov.row(a).setConstant(-1.0);
      ov.col(c).setConstant(-1.0);
    }
    for (std::size_t a = 0; a < alive.size(); ++a) {
      Track& tr = tracks[alive[a]];
      if (match[a] < 0) {
        tr.alive = false;
        continue;
      }
      const int best = keep[match[a]];
      const double bo = std::abs(tr.vec.dot(es.eigenvectors().col(best)));
      EigenphaseRow row;
      row.k = k;
      row.track = tr.id;
      row.eigenvalue = es.eigenvalues()[best];
      // A competing candidate with a different eigenvalue and comparable
      // overlap means the tracks may have crossed.
      for (int i : keep) {
        if (i == best) continue;
        const double o = std::abs(tr.vec.dot(es.eigenvectors().col(i)));
        if (o > 0.5 * bo && std::abs(es.eigenvalues()[i] - row.eigenvalue) > 1e-8) row.ambiguous = true;
      }
      row.increment = -std::arg(row.eigenvalue / tr.s);
      row.phase = tr.phase + row.increment;
      row.non_monotone = row.increment <= mono_tol;
      used[best] = true;
      tr.vec = es.eigenvectors().col(best);
      tr.s = row.eigenvalue;
      tr.phase = row.phase;
      out.non_monotone += row.non_monotone;
      out.ambiguous += row.ambiguous;
      out.rows.push_back(row);
    }
    for (int i : keep) {
      if (used[i]) continue;
      Track tr{static_cast<int>(tracks.size()), es.eigenvectors().col(i), es.eigenvalues()[i],
               -std::arg(es.eigenvalues()[i]), true};
      EigenphaseRow row;
      row.k = k;
      row.track = tr.id;
      row.eigenvalue = tr.s;
      row.phase = tr.phase;
      out.rows.push_back(row);
      tracks.push_back(std::move(tr));
    }
  }
  out.tracks = static_cast<int>(tracks.size());
  return out;
}

// ---------------------------------------------------------------------------
// Disk injectivity conditions

struct InjectivityResult {
  bool injective = true;
  std::vector<int> witnesses;   // orders l with a vanishing Bessel value
  int orders_checked = 0;
};

/// Checks J_l(kR) != 0 and Y_l(kR) != 0 for 0 <= l < kR - (pi-1)/2 (d = 2),
/// or j_l, y_l for 0 <= l < kR - pi/2 (d = 3).
inline InjectivityResult check_injectivity_circle(double k, double R, int d, double tol = 1e-10) {
  specfun::check_dimension(d);
  if (!(k > 0.0) || !(R > 0.0)) throw DomainError("check_injectivity_circle: k and R must be positive");
  const double bound = d == 2 ? k * R - (kPi - 1.0) / 2.0 : k * R - kPi / 2.0;
  InjectivityResult out;
  for (int l = 0; l < bound; ++l) {
    const specfun::BesselPair p =
        d == 2 ? specfun::bessel_jy(l, k * R) : specfun::spherical_jy(l, k * R);
    ++out.orders_checked;
    if (std::abs(p.j) < tol || std::abs(p.y) < tol) {
      out.injective = false;
      out.witnesses.push_back(l);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Small-k behaviour of W(k)

struct DecaySlope {
  std::vector<double> k;
  std::vector<double> norm;
  double slope = 0.0;              // least-squares slope of log ||W|| against log k
  double log_corrected_slope = 0.0;  // same for ||W|| / |ln k|
};

/// Norms of W(k) on `samples` log-spaced wavenumbers in [k_lo, k_hi].
inline DecaySlope w_decay_slope(const BoundaryMesh& mesh, double k_lo, double k_hi, int samples) {
  if (!(k_lo > 0.0) || !(k_hi > k_lo) || samples < 2) throw DomainError("w_decay_slope: invalid range");
  DecaySlope out;
  for (int s = 0; s < samples; ++s) {
    const double k = k_lo * std::pow(k_hi / k_lo, static_cast<double>(s) / (samples - 1));
    out.k.push_back(k);
    out.norm.push_back(assemble_W(mesh, k).norm());
  }
  auto fit = [&](bool corrected) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int s = 0; s < samples; ++s) {
      const double x = std::log(out.k[s]);
      const double y = std::log(out.norm[s] / (corrected ? std::abs(std::log(out.k[s])) : 1.0));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
  };
  out.slope = fit(false);
  out.log_corrected_slope = fit(true);
  return out;
}

}  // namespace imgreen
