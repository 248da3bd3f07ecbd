#pragma once

// Recovery of v from boundary Green data at one wavenumber: regularized
// Gauss-Newton on a piecewise-constant coarse basis, the imaginary-part-only
// pipeline, and the small-frequency Helmholtz variant.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>

#include "imgreen/errors.hpp"
#include "imgreen/forward.hpp"
#include "imgreen/geometry.hpp"
#include "imgreen/lippmann_schwinger.hpp"
#include "imgreen/potentials.hpp"
#include "imgreen/spectral.hpp"

namespace imgreen {

/// Piecewise-constant functions on an nc x nc partition of the mesh bounding
/// box. Unknowns are the coarse cells whose center lies within
/// `support_fraction` times the inner radius; v vanishes elsewhere.
struct CoarseBasis {
  int nc = 12;
  double x0 = 0.0, y0 = 0.0, size = 0.0;   // lower-left corner and cell side
  std::vector<int> coarse_of_fine;         // per fine cell: nc*nc index, -1 outside the box
  std::vector<int> param_of_coarse;        // per coarse cell: parameter index or -1
  std::vector<int> coarse_of_param;
  std::vector<std::vector<int>> fine_cells_of_param;

  int num_params() const { return static_cast<int>(coarse_of_param.size()); }
  int num_coarse() const { return nc * nc; }

  Vec2 coarse_center(int c) const {
    return {x0 + (c % nc + 0.5) * size, y0 + (c / nc + 0.5) * size};
  }

  /// Fine-grid mask of the cells carrying an unknown.
  std::vector<bool> support_mask(int fine_cells) const {
    std::vector<bool> m(fine_cells, false);
    for (const auto& cells : fine_cells_of_param) {
      for (int c : cells) m[c] = true;
    }
    return m;
  }

  Potential expand(const RVector& p, int fine_cells, std::string desc = "recovered") const {
    Potential v;
    v.values = RVector::Zero(fine_cells);
    for (int q = 0; q < num_params(); ++q) {
      for (int c : fine_cells_of_param[q]) v.values[c] = p[q];
    }
    v.description = std::move(desc);
    return v;
  }

  /// Averages of a fine-grid potential over the parameter cells.
  RVector project(const Potential& v) const {
    RVector p(num_params());
    for (int q = 0; q < num_params(); ++q) {
      double s = 0.0;
      for (int c : fine_cells_of_param[q]) s += v.values[c];
      p[q] = s / static_cast<double>(fine_cells_of_param[q].size());
    }
    return p;
  }

  /// Averages over every coarse cell meeting the domain (NaN for cells with
  /// no fine cell inside).
  RVector coarse_averages(const Potential& v) const {
    RVector sum = RVector::Zero(num_coarse()), cnt = RVector::Zero(num_coarse());
    for (std::size_t c = 0; c < coarse_of_fine.size(); ++c) {
      const int a = coarse_of_fine[c];
      if (a < 0) continue;
      sum[a] += v.values[static_cast<Eigen::Index>(c)];
      cnt[a] += 1.0;
    }
    RVector out(num_coarse());
    for (int a = 0; a < num_coarse(); ++a) out[a] = cnt[a] > 0.0 ? sum[a] / cnt[a] : std::nan("");
    return out;
  }

  /// Coarse-grid values of a parameter vector (zero on non-parameter cells
  /// meeting the domain, NaN outside it).
  RVector coarse_values(const RVector& p, const RVector& reference_averages) const {
    RVector out(num_coarse());
    for (int a = 0; a < num_coarse(); ++a) {
      const int q = param_of_coarse[a];
      out[a] = std::isnan(reference_averages[a]) ? std::nan("") : (q >= 0 ? p[q] : 0.0);
    }
    return out;
  }
};

inline CoarseBasis make_coarse_basis(const BoundaryMesh& mesh, const VolumeGrid& grid, int nc = 12,
                                     double support_fraction = 0.75) {
  if (nc < 2) throw DomainError("make_coarse_basis: need at least 2 x 2 coarse cells");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Vec2& p : mesh.nodes) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  CoarseBasis b;
  b.nc = nc;
  b.size = std::max(xmax - xmin, ymax - ymin) / nc;
  b.x0 = 0.5 * (xmin + xmax) - 0.5 * nc * b.size;
  b.y0 = 0.5 * (ymin + ymax) - 0.5 * nc * b.size;
  const double rmax = support_fraction * inner_radius(mesh);
  b.param_of_coarse.assign(nc * nc, -1);
  for (int a = 0; a < nc * nc; ++a) {
    if (b.coarse_center(a).norm() < rmax) {
      b.param_of_coarse[a] = static_cast<int>(b.coarse_of_param.size());
      b.coarse_of_param.push_back(a);
    }
  }
  b.fine_cells_of_param.resize(b.coarse_of_param.size());
  b.coarse_of_fine.assign(grid.size(), -1);
  for (int c = 0; c < grid.size(); ++c) {
    const Vec2& x = grid.centers[c];
    const int ix = static_cast<int>(std::floor((x.x() - b.x0) / b.size));
    const int iy = static_cast<int>(std::floor((x.y() - b.y0) / b.size));
    if (ix < 0 || iy < 0 || ix >= nc || iy >= nc) continue;
    const int a = iy * nc + ix;
    b.coarse_of_fine[c] = a;
    if (b.param_of_coarse[a] >= 0) b.fine_cells_of_param[b.param_of_coarse[a]].push_back(c);
  }
  for (std::size_t q = 0; q < b.fine_cells_of_param.size(); ++q) {
    if (b.fine_cells_of_param[q].empty()) throw DomainError("make_coarse_basis: coarse cell without fine cells");
  }
  return b;
}

/// Relative L2 error on the coarse grid: recovered coefficients against
/// coarse-cell averages of the true potential.
inline double coarse_relative_error(const CoarseBasis& basis, const RVector& p, const Potential& v_true) {
  const RVector avg = basis.coarse_averages(v_true);
  const RVector rec = basis.coarse_values(p, avg);
  double num = 0.0, den = 0.0;
  for (int a = 0; a < basis.num_coarse(); ++a) {
    if (std::isnan(avg[a])) continue;
    num += (rec[a] - avg[a]) * (rec[a] - avg[a]);
    den += avg[a] * avg[a];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

struct InversionOptions {
  double alpha = 1e-8;        // Tikhonov weight relative to mean diag(J^T J)
  int max_iter = 15;
  int max_halvings = 20;
  double step_tol = 1e-10;    // stop when the objective decreases by less (relative)
};

struct InversionResult {
  Potential recovered;
  RVector coefficients;
  double data_residual = 0.0;           // weighted misfit ||G(v_rec) - G_data||_F,w
  double relative_data_residual = 0.0;  // divided by ||G_data - G_0||_F,w
  int iterations = 0;
  double regularization = 0.0;          // effective alpha used in the normal equations
  bool converged = false;
  std::vector<double> misfit_history;
  std::vector<std::string> warnings;
};

/// Forward map p -> G_v - G_0 on the coarse basis, with Jacobian.
class CoarseForward {
 public:
  CoarseForward(const BoundaryMesh& mesh, const VolumeGrid& grid, const CoarseBasis& basis, double k)
      : mesh_(&mesh), grid_(&grid), basis_(&basis), k_(k), mask_(basis.support_mask(grid.size())) {
    const int n = mesh.size();
    sqrt_w_ = mesh.weights.cwiseSqrt();
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i <= j; ++i) pairs_.emplace_back(i, j);
    }
  }

  int residual_size() const { return 2 * static_cast<int>(pairs_.size()); }

  /// Weighted upper-triangle vector of a symmetric kernel matrix, split into
  /// real and imaginary parts; its Euclidean norm is the weighted Frobenius norm.
  RVector flatten(const CMatrix& K) const {
    const int np = static_cast<int>(pairs_.size());
    RVector r(2 * np);
    for (int t = 0; t < np; ++t) {
      const auto [i, j] = pairs_[t];
      const double s = sqrt_w_[i] * sqrt_w_[j] * (i == j ? 1.0 : std::sqrt(2.0));
      const cplx z = s * K(i, j);
      r[t] = z.real();
      r[np + t] = z.imag();
    }
    return r;
  }

  /// Kernel values of G_v - G_0 and, optionally, the Jacobian columns.
  CMatrix remainder(const RVector& p, RMatrix* jac = nullptr) const {
    const Potential v = basis_->expand(p, grid_->size());
    const LippmannSchwinger ls(*grid_, v, k_, mask_);
    const CMatrix B = ls.point_to_active(mesh_->nodes);
    const CMatrix U = ls.solve_active(B.transpose());
    const double h2 = grid_->cell_area;
    const CMatrix rem = -h2 * (B * ls.active_values().asDiagonal() * U);
    if (jac) {
      std::vector<int> slot(grid_->size(), -1);
      for (std::size_t a = 0; a < ls.active().size(); ++a) slot[ls.active()[a]] = static_cast<int>(a);
      jac->resize(residual_size(), basis_->num_params());
      for (int q = 0; q < basis_->num_params(); ++q) {
        CMatrix dK = CMatrix::Zero(mesh_->size(), mesh_->size());
        for (int c : basis_->fine_cells_of_param[q]) {
          const auto row = U.row(slot[c]);
          dK.noalias() -= h2 * (row.transpose() * row);
        }
        jac->col(q) = flatten(dK);
      }
    }
    return rem;
  }

 private:
  const BoundaryMesh* mesh_;
  const VolumeGrid* grid_;
  const CoarseBasis* basis_;
  double k_;
  std::vector<bool> mask_;
  RVector sqrt_w_;
  std::vector<std::pair<int, int>> pairs_;
};

/// Symmetrized kernel values of G_data - G_0.
inline CMatrix data_remainder(const BoundaryOperator& G_data, const BoundaryMesh& mesh, double k) {
  const BoundaryOperator G0 = assemble_G0(mesh, k);
  if (G_data.domain != G0.domain || G_data.range != G0.range) {
    throw SpaceMismatch("recover_v: data operator does not act on the mesh's boundary space");
  }
  CMatrix D = (G_data.matrix - G0.matrix) * mesh.weights.cwiseInverse().asDiagonal();
  return 0.5 * (D + D.transpose());
}

/// Gauss-Newton on F(p) = G_v(p) - G_0 with Tikhonov penalty
/// alpha_eff ||p - p_init||^2 and a halving line search.
inline InversionResult recover_v(const BoundaryOperator& G_data, const BoundaryMesh& mesh, const VolumeGrid& grid,
                                 const CoarseBasis& basis, const Potential& v_init, double k,
                                 const InversionOptions& opt = {}) {
  const CoarseForward fwd(mesh, grid, basis, k);
  const RVector d = fwd.flatten(data_remainder(G_data, mesh, k));
  const double dnorm = d.norm();
  const RVector p_init = basis.project(v_init);
  RVector p = p_init;

  InversionResult out;
  RMatrix J;
  RVector r = fwd.flatten(fwd.remainder(p, &J)) - d;
  double alpha_eff = opt.alpha * J.colwise().squaredNorm().mean();
  if (!(alpha_eff > 0.0)) alpha_eff = opt.alpha;
  out.regularization = alpha_eff;
  auto objective = [&](const RVector& res, const RVector& pp) {
    return res.squaredNorm() + alpha_eff * (pp - p_init).squaredNorm();
  };
  double obj = objective(r, p);
  out.misfit_history.push_back(r.norm());
  int failures = 0;
  for (int it = 0; it < opt.max_iter; ++it) {
    RMatrix N = J.transpose() * J;
    N.diagonal().array() += alpha_eff;
    const RVector g = J.transpose() * r + alpha_eff * (p - p_init);
    const RVector step = -N.ldlt().solve(g);
    double t = 1.0;
    bool accepted = false;
    RVector p_new, r_new;
    for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
      p_new = p + t * step;
      r_new = fwd.flatten(fwd.remainder(p_new)) - d;
      if (objective(r_new, p_new) < obj) {
        accepted = true;
        break;
      }
    }
    out.iterations = it + 1;
    if (!accepted) {
      if (++failures >= 2) break;
      out.converged = true;  // no descent left along the Gauss-Newton direction
      break;
    }
    const double obj_new = objective(r_new, p_new);
    const double decrease = (obj - obj_new) / std::max(obj, 1e-300);
    p = p_new;
    obj = obj_new;
    r = fwd.flatten(fwd.remainder(p, &J)) - d;
    out.misfit_history.push_back(r.norm());
    if (decrease < opt.step_tol || r.norm() <= 1e-12 * std::max(dnorm, 1e-300)) {
      out.converged = true;
      break;
    }
  }
  out.coefficients = p;
  out.recovered = basis.expand(p, grid.size());
  out.data_residual = r.norm();
  out.relative_data_residual = dnorm > 0.0 ? r.norm() / dnorm : r.norm();
  if (!out.converged) out.warnings.push_back("Gauss-Newton stopped before convergence");
  return out;
}

struct PipelineOptions {
  SpectralOptions spectral;
  InversionOptions inversion;
  double lift_alpha = 1e-8;    // relative to sigma_max(T)^4
};

struct PipelineResult {
  InversionResult inversion;
  Reconstruction reconstruction;
  ReferenceInertia reference;
  BoundaryOperator G_reconstructed;
};

/// Relative size of the anti-Hermitian part.
inline double symmetry_residual_hermitian(const BoundaryOperator& A) {
  const double n = A.norm();
  return n > 0.0 ? (A - A.adjoint()).norm() / n : 0.0;
}

/// Im G_v -> B~ -> A~ (signs from the reference) -> lift -> Gauss-Newton.
inline PipelineResult imag_only_recover_v(const BoundaryOperator& ImG_data, const BoundaryMesh& mesh,
                                          const VolumeGrid& grid, const CoarseBasis& basis, const Potential& v0,
                                          double k, const DirectionGrid& dirs, const PipelineOptions& opt = {},
                                          const ReferenceInertia* fixed_reference = nullptr) {
  if (symmetry_residual_hermitian(ImG_data) > 1e-8) {
    throw PreconditionError("imag_only_recover_v: data must be Im G (a Hermitian operator)", "data");
  }
  PipelineResult out;
  const BoundaryOperator T = with_stage("far-field", [&] { return assemble_T(mesh, k, dirs); });
  const BoundaryOperator Gv0 = with_stage("reference", [&] { return assemble_Gv(mesh, grid, v0, k); });
  const BoundaryOperator Gt0 = assemble_Gv_tilde(T, Gv0);
  out.reference = with_stage("reference", [&] {
    if (fixed_reference) return *fixed_reference;
    check_boundary_injectivity(Gv0);
    return reference_inertia_from_tilde(Gt0, k, v0.description, opt.spectral.eps_spec);
  });
  const BoundaryOperator Bt = assemble_Gv_tilde(T, ImG_data);
  out.reconstruction = with_stage("reconstruct", [&] { return reconstruct_A_tilde(Bt, out.reference, opt.spectral); });
  const BoundaryOperator Gt_rec = out.reconstruction.A_tilde + kI * Bt;
  out.G_reconstructed = with_stage("lift", [&] {
    const BoundaryOperator X = lift_to_boundary(Gt_rec - Gt0, T, opt.lift_alpha);
    return (Gv0 + X).re() + kI * ImG_data;
  });
  out.inversion = with_stage("invert", [&] {
    return recover_v(out.G_reconstructed, mesh, grid, basis, v0, k, opt.inversion);
  });
  return out;
}

/// Helmholtz case rho = 1, kappa_c = 1: v = omega^2 (1 - kappa), k = omega.
inline Potential helmholtz_potential(const Potential& kappa, double omega) {
  Potential v;
  v.values = omega * omega * (1.0 - kappa.values.array()).matrix();
  v.description = "omega^2 (1 - kappa)";
  return v;
}

inline Potential helmholtz_kappa(const Potential& v, double omega) {
  Potential kappa;
  kappa.values = (1.0 - v.values.array() / (omega * omega)).matrix();
  kappa.description = "kappa";
  return kappa;
}

struct HelmholtzResult {
  PipelineResult pipeline;
  Potential kappa;
  RVector kappa_coefficients;   // 1 - p / omega^2 on the parameter cells
  int reference_rank = 0;
};

/// Small-frequency pipeline: the reference kappa = 1 (v0 = 0) must have
/// Re G~ of negative inertia zero at omega, so all signs are positive.
inline HelmholtzResult helmholtz_small_freq_recover(const BoundaryOperator& ImP_data, const BoundaryMesh& mesh,
                                                    const VolumeGrid& grid, const CoarseBasis& basis, double omega,
                                                    const DirectionGrid& dirs, const PipelineOptions& opt = {}) {
  if (!(omega > 0.0)) throw DomainError("helmholtz_small_freq_recover: omega must be positive");
  Potential v0 = sample_potential(grid, [](const Vec2&) { return 0.0; }, "kappa = 1");
  const ReferenceInertia ref = with_stage("reference", [&] {
    return reference_inertia(v0, mesh, grid, omega, dirs, opt.spectral.eps_spec);
  });
  if (ref.rank > 0) {
    throw PreconditionError("omega not in the small-frequency regime (reference inertia rank " +
                            std::to_string(ref.rank) + ")",
                            "reference");
  }
  HelmholtzResult out;
  out.reference_rank = ref.rank;
  out.pipeline = imag_only_recover_v(ImP_data, mesh, grid, basis, v0, omega, dirs, opt, &ref);
  out.kappa = helmholtz_kappa(out.pipeline.inversion.recovered, omega);
  // Cells without an unknown keep kappa = 1.
  out.kappa_coefficients = (1.0 - out.pipeline.inversion.coefficients.array() / (omega * omega)).matrix();
  return out;
}

struct OmegaZeroScan {
  double omega0 = 0.0;             // largest tested omega with rank 0 for every test kappa
  double first_failure = 0.0;      // smallest tested omega with a positive rank (0 if none)
  std::vector<std::pair<double, int>> samples;   // (omega, max rank over the test set)
};

/// Test set for ||kappa||_inf <= M: kappa = 1, M on a subdisk, 1 + (M - 1) bump, 1/M on a subdisk.
inline std::vector<Potential> omega_zero_test_kappas(const BoundaryMesh& mesh, const VolumeGrid& grid, double M) {
  if (!(M >= 1.0)) throw DomainError("omega scan: M must be at least kappa_c = 1");
  const double rin = inner_radius(mesh);
  const Field disk = disk_indicator(1.0, Vec2(0.1 * rin, 0.15 * rin), 0.4 * rin);
  const Field b = bump(1.0, Vec2(0.15 * rin, 0.1 * rin), 0.45 * rin);
  return {sample_potential(grid, [](const Vec2&) { return 1.0; }, "kappa=1"),
          sample_potential(grid, [&](const Vec2& x) { return 1.0 + (M - 1.0) * disk(x); }, "kappa=M on disk"),
          sample_potential(grid, [&](const Vec2& x) { return 1.0 + (M - 1.0) * b(x); }, "kappa=1+(M-1)bump"),
          sample_potential(grid, [&](const Vec2& x) { return 1.0 + (1.0 / M - 1.0) * disk(x); }, "kappa=1/M on disk")};
}

inline int helmholtz_max_rank(const BoundaryMesh& mesh, const VolumeGrid& grid, const std::vector<Potential>& kappas,
                              double omega, const DirectionGrid& dirs, double eps_spec) {
  const BoundaryOperator T = assemble_T(mesh, omega, dirs);
  int worst = 0;
  for (const Potential& kappa : kappas) {
    const BoundaryOperator G = assemble_Gv(mesh, grid, helmholtz_potential(kappa, omega), omega);
    worst = std::max(worst, inertia_rank(assemble_Gv_tilde(T, G).re(), eps_spec));
  }
  return worst;
}

/// Scans omega on a uniform grid, then bisects between the last rank-0
/// sample and the first failing one.
inline OmegaZeroScan scan_omega_zero(const BoundaryMesh& mesh, const VolumeGrid& grid, double M, double omega_lo,
                                     double omega_hi, int steps, int bisections, const DirectionGrid& dirs,
                                     double eps_spec = 1e-10) {
  if (!(omega_lo > 0.0) || !(omega_hi > omega_lo) || steps < 1) throw DomainError("omega scan: invalid range");
  const std::vector<Potential> kappas = omega_zero_test_kappas(mesh, grid, M);
  OmegaZeroScan out;
  double good = 0.0, bad = 0.0;
  for (int s = 0; s <= steps; ++s) {
    const double w = omega_lo + (omega_hi - omega_lo) * s / steps;
    const int r = helmholtz_max_rank(mesh, grid, kappas, w, dirs, eps_spec);
    out.samples.emplace_back(w, r);
    if (r > 0) {
      bad = w;
      break;
    }
    good = w;
  }
  if (bad > 0.0 && good > 0.0) {
    for (int b = 0; b < bisections; ++b) {
      const double mid = 0.5 * (good + bad);
      const int r = helmholtz_max_rank(mesh, grid, kappas, mid, dirs, eps_spec);
      out.samples.emplace_back(mid, r);
      (r > 0 ? bad : good) = mid;
    }
  }
  out.omega0 = good;
  out.first_failure = bad;
  return out;
}

}  // namespace imgreen
