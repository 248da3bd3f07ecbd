#pragma once

// The imgreen commands: verify, spectrum, reconstruct, invert, scan and
// disk-analytic. Each produces IdentityReports plus CSV tables; `run`
// writes them under the output directory and maps outcomes to exit codes.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "imgreen/acoustic.hpp"
#include "imgreen/cli/config.hpp"
#include "imgreen/forward.hpp"
#include "imgreen/identities.hpp"
#include "imgreen/inversion.hpp"
#include "imgreen/io/csv.hpp"
#include "imgreen/io/json_report.hpp"
#include "imgreen/lippmann_schwinger.hpp"
#include "imgreen/spectral.hpp"

namespace imgreen::cli {

enum ExitCode { kPass = 0, kCheckFailed = 1, kConfigError = 2, kPreconditionError = 3 };

struct CommandOutput {
  std::vector<IdentityReport> reports;
  std::map<std::string, io::CsvTable> tables;   // file name -> table
  std::vector<std::string> notes;

  bool all_pass() const {
    for (const auto& r : reports) {
      if (!r.pass) return false;
    }
    return true;
  }
};

namespace detail {

inline std::string num(double x) { return io::format_double(x); }

inline BoundaryMesh mesh_for(const ExperimentConfig& c, int n) {
  try {
    return build_mesh(c.geometry, n);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("key 'geometry': ") + e.what());
  }
}

inline Potential potential_on(const PotentialSpec& spec, const BoundaryMesh& mesh, const VolumeGrid& grid,
                              std::uint64_t seed) {
  return sample_potential(grid, family_field(spec, inner_radius(mesh), seed), spec.name());
}

/// Report whose pass condition is value >= threshold.
inline IdentityReport at_least(std::string name, double value, double threshold, int mesh_size,
                               std::map<std::string, std::string> ctx = {}) {
  IdentityReport r = make_report(std::move(name), value, threshold, mesh_size, std::move(ctx));
  r.pass = value >= threshold;
  r.context["pass_if"] = "residual >= tolerance";
  return r;
}

inline io::CsvTable& table(CommandOutput& out, const std::string& file, std::vector<std::string> header) {
  return out.tables.try_emplace(file, std::move(header)).first->second;
}

inline void add_residual_row(CommandOutput& out, const IdentityReport& r) {
  auto get = [&](const char* key) {
    const auto it = r.context.find(key);
    return it == r.context.end() ? std::string() : it->second;
  };
  table(out, "residuals.csv", {"check", "potential", "k", "n", "residual", "tolerance", "pass"})
      .add_row({r.name, get("potential"), get("k"), static_cast<long long>(r.mesh_size), r.residual, r.tolerance,
                std::string(r.pass ? "true" : "false")});
}

inline void push(CommandOutput& out, IdentityReport r, const std::map<std::string, std::string>& ctx) {
  for (const auto& [k, v] : ctx) r.context.emplace(k, v);
  add_residual_row(out, r);
  out.reports.push_back(std::move(r));
}

/// ABQ residuals at mesh size n (A, B = Re, Im G_v; Q = -T*T).
inline std::pair<IdentityReport, IdentityReport> abq_at(const ExperimentConfig& c, const PotentialSpec& spec,
                                                        double k, int n) {
  const BoundaryMesh mesh = mesh_for(c, n);
  const DirectionGrid dirs = make_directions(n);
  const VolumeGrid grid = make_grid(mesh, c.discretization.h);
  const Potential v = potential_on(spec, mesh, grid, c.seed);
  const BoundaryOperator Gv = assemble_Gv(mesh, grid, v, k);
  const BoundaryOperator T = assemble_T(mesh, k, dirs);
  const BoundaryOperator Q = -1.0 * (T.adjoint() * T);
  return check_ABQ(Gv.re(), Gv.im(), Q, c.tol("identity"));
}

}  // namespace detail

inline CommandOutput cmd_verify(const ExperimentConfig& c) {
  CommandOutput out;
  std::vector<PotentialSpec> pots = c.potentials.empty() ? std::vector<PotentialSpec>{{"zero", 0.0}} : c.potentials;
  const int n = c.discretization.n;
  const BoundaryMesh mesh = detail::mesh_for(c, n);
  const DirectionGrid dirs = make_directions(c.discretization.m);
  const VolumeGrid grid = make_grid(mesh, c.discretization.h);
  for (double k : c.wavenumbers) {
    const BoundaryOperator T = with_stage("forward", [&] { return assemble_T(mesh, k, dirs); });
    const BoundaryOperator Tn = dirs.size() == n ? T : assemble_T(mesh, k, make_directions(n));
    const BoundaryOperator Q = -1.0 * (Tn.adjoint() * Tn);
    for (const PotentialSpec& spec : pots) {
      const std::map<std::string, std::string> ctx{{"potential", spec.name()}, {"k", detail::num(k)}};
      const Potential v = detail::potential_on(spec, mesh, grid, c.seed);
      const BoundaryOperator Gv = with_stage("forward", [&] { return assemble_Gv(mesh, grid, v, k); });
      const auto [r1, r2] = check_ABQ(Gv.re(), Gv.im(), Q, c.tol("identity"));
      detail::push(out, r1, ctx);
      detail::push(out, r2, ctx);
      if (c.refine) {
        const auto [f1, f2] = detail::abq_at(c, spec, k, 2 * n);
        for (const auto& [coarse, fine] : {std::pair{r1, f1}, std::pair{r2, f2}}) {
          const ConvergenceCheck cc = convergence_order(coarse.residual, fine.residual);
          IdentityReport rep = make_report(coarse.name + " n->2n", fine.residual, coarse.residual / 4.0, 2 * n,
                                           {{"order", detail::num(cc.order)}, {"at_floor", cc.at_floor ? "true" : "false"}});
          rep.pass = cc.pass;
          detail::push(out, rep, ctx);
        }
      }
      detail::push(out, make_report("symmetry", symmetry_residual(Gv), c.tol("symmetry"), n), ctx);
      const BoundaryOperator Gt = assemble_Gv_tilde(T, Gv);
      detail::push(out, check_circle_law(Gt, c.tol("circle_law")), ctx);
      detail::push(out, check_unitarity(scattering_matrix(Gt), c.tol("unitarity")), ctx);
      if (dirs.size() % 2 == 0) {
        detail::push(out, check_stone(Gv.im(), herglotz_imgv(mesh, grid, v, k, dirs), c.tol("stone")), ctx);
        detail::push(out,
                     check_mixed_reciprocity(reflected_conj_herglotz_adjoint(mesh, grid, v, k, dirs), T, Gv, k,
                                             c.tol("reciprocity")),
                     ctx);
      }
    }
  }
  return out;
}

inline CommandOutput cmd_spectrum(const ExperimentConfig& c) {
  CommandOutput out;
  std::vector<PotentialSpec> pots = c.potentials.empty() ? std::vector<PotentialSpec>{{"zero", 0.0}} : c.potentials;
  const int n = c.discretization.n;
  const BoundaryMesh mesh = detail::mesh_for(c, n);
  const DirectionGrid dirs = make_directions(c.discretization.m);
  const VolumeGrid grid = make_grid(mesh, c.discretization.h);
  const Potential v0 = detail::potential_on(c.reference, mesh, grid, c.seed);
  auto& tab = detail::table(out, "spectrum.csv",
                            {"potential", "k", "index", "cluster", "lambda_B", "lambda_A_reconstructed",
                             "lambda_A_direct", "distance", "margin", "tail"});
  for (double k : c.wavenumbers) {
    const BoundaryOperator T = with_stage("forward", [&] { return assemble_T(mesh, k, dirs); });
    const ReferenceInertia ref = with_stage("reference", [&] { return reference_inertia(v0, mesh, grid, k, dirs); });
    for (const PotentialSpec& spec : pots) {
      const std::map<std::string, std::string> ctx{{"potential", spec.name()}, {"k", detail::num(k)},
                                                   {"reference_rank", std::to_string(ref.rank)}};
      const Potential v = detail::potential_on(spec, mesh, grid, c.seed);
      const BoundaryOperator Gt = assemble_Gv_tilde(T, assemble_Gv(mesh, grid, v, k));
      const BoundaryOperator At = Gt.re(), Bt = Gt.im();
      const SpectralDecomposition jd = with_stage("spectral", [&] { return joint_diagonalize(At, Bt); });
      double circle = 0.0;
      for (int i = 0; i < jd.size(); ++i) {
        const double b = jd.eigenvalues_B[i];
        circle = std::max(circle, std::abs(jd.eigenvalues_A[i] * jd.eigenvalues_A[i] - (b - b * b)));
      }
      detail::push(out, make_report("lambda_A^2-(lambda_B-lambda_B^2)", circle, 1e-6, n), ctx);
      const Reconstruction rec = with_stage("reconstruct", [&] { return reconstruct_A_tilde(Bt, ref); });
      const CMatrix na = hermitian_normalized(At);
      for (int i = 0; i < rec.dec.size(); ++i) {
        const CVector f = rec.dec.vectors.col(i);
        const double direct = f.dot(na * f).real();
        tab.add_row({spec.name(), k, static_cast<long long>(i), static_cast<long long>(rec.dec.cluster[i]),
                     rec.dec.eigenvalues_B[i], rec.signs.lambda_A[i], direct, rec.signs.distance[i],
                     rec.signs.margin[i], std::string(rec.signs.tail[i] ? "true" : "false")});
      }
      detail::push(out, make_report("A~ reconstruction", relative_distance(rec.A_tilde, At, At),
                                    c.tol("reconstruction"), n),
                   ctx);
      detail::push(out, detail::at_least("min sign margin", rec.signs.min_margin, c.tol("margin"), n), ctx);
      for (const auto& w : rec.signs.warnings) out.notes.push_back(w);
    }
  }
  return out;
}

inline void add_recovery_table(CommandOutput& out, const CoarseBasis& basis, const RVector& coeffs,
                               const Potential& truth, const std::string& label) {
  const RVector avg = basis.coarse_averages(truth);
  const RVector rec = basis.coarse_values(coeffs, avg);
  auto& tab = detail::table(out, "recovered_v.csv", {"field", "ix", "iy", "x", "y", "recovered", "true_average"});
  for (int a = 0; a < basis.num_coarse(); ++a) {
    if (std::isnan(avg[a])) continue;
    const Vec2 x = basis.coarse_center(a);
    tab.add_row({label, static_cast<long long>(a % basis.nc), static_cast<long long>(a / basis.nc), x.x(), x.y(),
                 rec[a], avg[a]});
  }
}

inline CommandOutput cmd_reconstruct(const ExperimentConfig& c) {
  if (c.potentials.empty()) throw ConfigError("reconstruct needs one entry in 'potentials'");
  CommandOutput out;
  const double k = c.wavenumbers.front();
  const PotentialSpec& spec = c.potentials.front();
  const BoundaryMesh mesh = detail::mesh_for(c, c.discretization.n);
  const DirectionGrid dirs = make_directions(c.discretization.m);
  const VolumeGrid grid = make_grid(mesh, c.discretization.h);
  const VolumeGrid data_grid = make_grid(mesh, c.discretization.data_h);
  const CoarseBasis basis = make_coarse_basis(mesh, grid, c.discretization.coarse);
  const std::map<std::string, std::string> ctx{{"potential", spec.name()}, {"k", detail::num(k)},
                                               {"reference", c.reference.name()}};
  const BoundaryOperator G_data = with_stage("data", [&] {
    return assemble_Gv(mesh, data_grid, detail::potential_on(spec, mesh, data_grid, c.seed), k);
  });
  PipelineOptions po;
  po.inversion.alpha = c.alpha;
  po.inversion.max_iter = c.max_iter;
  po.lift_alpha = c.lift_alpha;
  const PipelineResult res = imag_only_recover_v(G_data.im(), mesh, grid, basis,
                                                 detail::potential_on(c.reference, mesh, grid, c.seed), k, dirs, po);
  const BoundaryOperator T = assemble_T(mesh, k, dirs);
  const BoundaryOperator At_direct = assemble_Gv_tilde(T, G_data).re();
  detail::push(out, make_report("A~ reconstruction", relative_distance(res.reconstruction.A_tilde, At_direct, At_direct),
                                c.tol("reconstruction"), mesh.size()),
               ctx);
  detail::push(out, detail::at_least("min sign margin", res.reconstruction.signs.min_margin, c.tol("margin"), mesh.size()),
               ctx);
  const Potential truth = detail::potential_on(spec, mesh, grid, c.seed);
  const double err = coarse_relative_error(basis, res.inversion.coefficients, truth);
  detail::push(out, make_report("recovered v relative L2", err, c.tol("recovery"), mesh.size(),
                                {{"iterations", std::to_string(res.inversion.iterations)},
                                 {"data_residual", detail::num(res.inversion.relative_data_residual)}}),
               ctx);
  add_recovery_table(out, basis, res.inversion.coefficients, truth, "v");
  for (const auto& w : res.reconstruction.signs.warnings) out.notes.push_back(w);
  for (const auto& w : res.inversion.warnings) out.notes.push_back(w);
  return out;
}

inline CommandOutput cmd_invert(const ExperimentConfig& c) {
  CommandOutput out;
  const BoundaryMesh mesh = detail::mesh_for(c, c.discretization.n);
  if (c.mode == "acoustic") {
    const AcousticConfig ac = c.acoustic.value_or(AcousticConfig{});
    ManufacturedMedium med;
    med.rho_c = ac.rho_c;
    med.kappa_c = ac.kappa_c;
    med.a = ac.rho_amplitude;
    med.b = ac.kappa_amplitude;
    const double rin = inner_radius(mesh);
    med.rho_center *= rin;
    med.rho_support *= rin;
    med.kappa_center *= rin;
    med.kappa_support *= rin;
    const AcousticConvergence conv = with_stage("acoustic", [&] {
      return acoustic_convergence(med, mesh, c.discretization.h, 3, ac.omegas[0], ac.omegas[1]);
    });
    auto& tab = detail::table(out, "acoustic_convergence.csv", {"h", "rho_max_error", "kappa_max_error"});
    for (std::size_t i = 0; i < conv.h.size(); ++i) tab.add_row({conv.h[i], conv.rho_error[i], conv.kappa_error[i]});
    const std::map<std::string, std::string> ctx{{"potential", "acoustic"}, {"k", detail::num(ac.omegas[0])}};
    detail::push(out, detail::at_least("rho error order", conv.rho_slope, 1.8, mesh.size()), ctx);
    detail::push(out, detail::at_least("kappa error order", conv.kappa_slope, 1.8, mesh.size()), ctx);
    return out;
  }
  if (c.potentials.empty()) throw ConfigError("invert needs one entry in 'potentials'");
  const double k = c.wavenumbers.front();
  const PotentialSpec& spec = c.potentials.front();
  const DirectionGrid dirs = make_directions(c.discretization.m);
  const VolumeGrid grid = make_grid(mesh, c.discretization.h);
  const VolumeGrid data_grid = make_grid(mesh, c.discretization.data_h);
  const CoarseBasis basis = make_coarse_basis(mesh, grid, c.discretization.coarse);
  const std::map<std::string, std::string> ctx{{"potential", spec.name()}, {"k", detail::num(k)}, {"mode", c.mode}};
  PipelineOptions po;
  po.inversion.alpha = c.alpha;
  po.inversion.max_iter = c.max_iter;
  po.lift_alpha = c.lift_alpha;
  if (c.mode == "helmholtz") {
    // potentials[0] describes kappa - 1; wavenumbers[0] is omega.
    auto kappa_on = [&](const VolumeGrid& g) {
      Potential p = detail::potential_on(spec, mesh, g, c.seed);
      p.values.array() += 1.0;
      return p;
    };
    const BoundaryOperator P = with_stage("data", [&] {
      return assemble_Gv(mesh, data_grid, helmholtz_potential(kappa_on(data_grid), k), k);
    });
    const HelmholtzResult res = helmholtz_small_freq_recover(P.im(), mesh, grid, basis, k, dirs, po);
    const Potential kappa = kappa_on(grid);
    Potential kappa_minus_one = kappa;
    kappa_minus_one.values.array() -= 1.0;
    const RVector pert = (res.kappa_coefficients.array() - 1.0).matrix();
    // ||kappa_rec - kappa|| / ||kappa|| on the coarse grid
    const RVector avg = basis.coarse_averages(kappa);
    double num = 0.0, den = 0.0;
    for (int a = 0; a < basis.num_coarse(); ++a) {
      if (std::isnan(avg[a])) continue;
      const int q = basis.param_of_coarse[a];
      const double rec = q >= 0 ? res.kappa_coefficients[q] : 1.0;
      num += (rec - avg[a]) * (rec - avg[a]);
      den += avg[a] * avg[a];
    }
    detail::push(out, make_report("kappa relative L2", std::sqrt(num / den), c.tol("recovery"), mesh.size(),
                                  {{"kappa_minus_one_relative",
                                    detail::num(coarse_relative_error(basis, pert, kappa_minus_one))},
                                   {"reference_rank", std::to_string(res.reference_rank)}}),
                 ctx);
    add_recovery_table(out, basis, res.kappa_coefficients, kappa, "kappa");
    return out;
  }
  const Potential v_data = detail::potential_on(spec, mesh, data_grid, c.seed);
  const BoundaryOperator G_data = with_stage("data", [&] { return assemble_Gv(mesh, data_grid, v_data, k); });
  const Potential v_init = detail::potential_on(c.reference, mesh, grid, c.seed);
  const InversionResult res = with_stage("invert", [&] {
    return recover_v(G_data, mesh, grid, basis, v_init, k, po.inversion);
  });
  const Potential truth = detail::potential_on(spec, mesh, grid, c.seed);
  detail::push(out, make_report("recovered v relative L2", coarse_relative_error(basis, res.coefficients, truth),
                                c.tol("recovery"), mesh.size(),
                                {{"iterations", std::to_string(res.iterations)},
                                 {"data_residual", detail::num(res.relative_data_residual)},
                                 {"converged", res.converged ? "true" : "false"}}),
               ctx);
  add_recovery_table(out, basis, res.coefficients, truth, "v");
  for (const auto& w : res.warnings) out.notes.push_back(w);
  return out;
}

inline CommandOutput cmd_scan(const ExperimentConfig& c) {
  CommandOutput out;
  const BoundaryMesh mesh = detail::mesh_for(c, c.discretization.n);
  const ScanConfig& s = c.scan;
  if (!s.eigenphase && !s.omega_zero && !s.w_decay) {
    throw ConfigError("scan needs at least one of 'options.eigenphase', 'options.omega_zero', 'options.w_decay'");
  }
  if (s.eigenphase) {
    const EigenphaseScan sc = with_stage("eigenphase", [&] {
      return scan_eigenphases(mesh, s.k_lo, s.k_hi, s.k_steps, c.discretization.m);
    });
    auto& tab = detail::table(out, "eigenphases.csv",
                              {"k", "track", "re_s", "im_s", "phase", "increment", "non_monotone", "ambiguous"});
    for (const auto& r : sc.rows) {
      tab.add_row({r.k, static_cast<long long>(r.track), r.eigenvalue.real(), r.eigenvalue.imag(), r.phase,
                   r.increment, std::string(r.non_monotone ? "true" : "false"),
                   std::string(r.ambiguous ? "true" : "false")});
    }
    detail::push(out, make_report("eigenphase non-monotone steps", sc.non_monotone, 0.0, mesh.size(),
                                  {{"tracks", std::to_string(sc.tracks)}, {"ambiguous", std::to_string(sc.ambiguous)}}),
                 {{"potential", "zero"}});
  }
  if (s.omega_zero) {
    const DirectionGrid dirs = make_directions(c.discretization.m);
    const VolumeGrid grid = make_grid(mesh, c.discretization.h);
    const OmegaZeroScan sc = with_stage("omega-zero", [&] {
      return scan_omega_zero(mesh, grid, s.M, s.omega_lo, s.omega_hi, s.omega_steps, s.bisections, dirs);
    });
    auto& tab = detail::table(out, "omega_zero.csv", {"omega", "max_rank"});
    for (const auto& [w, r] : sc.samples) tab.add_row({w, static_cast<long long>(r)});
    IdentityReport rep = detail::at_least("omega_0", sc.omega0, 0.0, mesh.size(),
                                          {{"first_failure", detail::num(sc.first_failure)}, {"M", detail::num(s.M)}});
    rep.pass = sc.omega0 > 0.0;
    detail::push(out, rep, {{"potential", "kappa test set"}});
  }
  if (s.w_decay) {
    const DecaySlope d = with_stage("w-decay", [&] { return w_decay_slope(mesh, s.w_k_lo, s.w_k_hi, s.w_samples); });
    auto& tab = detail::table(out, "w_decay.csv", {"k", "norm_W"});
    for (std::size_t i = 0; i < d.k.size(); ++i) tab.add_row({d.k[i], d.norm[i]});
    detail::push(out, make_report("|W slope / |ln k| - 2|", std::abs(d.log_corrected_slope - 2.0), 0.1, mesh.size(),
                                  {{"raw_slope", detail::num(d.slope)}}),
                 {{"potential", "zero"}});
  }
  return out;
}

inline CommandOutput cmd_disk_analytic(const ExperimentConfig& c) {
  if (c.geometry.kind != "circle") throw ConfigError("key 'geometry.kind': disk-analytic requires a circle");
  CommandOutput out;
  const double R = c.geometry.radius;
  const int n = c.discretization.n;
  const BoundaryMesh mesh = detail::mesh_for(c, n);
  auto& tab = detail::table(out, "disk_analytic.csv",
                            {"k", "mode", "re_g0", "im_g0", "re_t", "im_t", "q", "re_g0_tilde", "im_g0_tilde", "re_s",
                             "im_s", "e", "w"});
  for (double k : c.wavenumbers) {
    const std::map<std::string, std::string> ctx{{"potential", "zero"}, {"k", detail::num(k)}};
    for (int l = 0; l <= c.modes; ++l) {
      const cplx g = circle::g0(k, R, l), t = circle::t(k, R, l), gt = circle::g0_tilde(k, R, l), s = circle::s(k, R, l);
      tab.add_row({k, static_cast<long long>(l), g.real(), g.imag(), t.real(), t.imag(), circle::q(k, R, l), gt.real(),
                   gt.imag(), s.real(), s.imag(), circle::e(R, l), circle::w(k, R, l)});
    }
    const InjectivityResult inj = check_injectivity_circle(k, R, 2, c.tol("injectivity"));
    std::string witnesses;
    for (int w : inj.witnesses) witnesses += (witnesses.empty() ? "" : " ") + std::to_string(w);
    IdentityReport rep = make_report("injectivity (informational)", static_cast<double>(inj.witnesses.size()), 0.0, n,
                                     {{"injective", inj.injective ? "true" : "false"},
                                      {"witnesses", witnesses},
                                      {"orders_checked", std::to_string(inj.orders_checked)}});
    rep.pass = true;
    detail::push(out, rep, ctx);
    if (!inj.injective) {
      out.notes.push_back("k = " + detail::num(k) + ": injectivity fails, witness order(s) " + witnesses);
      continue;  // G0 is singular at a Dirichlet eigenvalue; golden comparison skipped
    }
    const BoundaryOperator G0 = assemble_G0(mesh, k);
    double worst = 0.0;
    for (int l = 0; l <= std::min(c.modes, n / 4); ++l) {
      const cplx exact = circle::g0(k, R, l);
      worst = std::max(worst, std::abs(fourier_eigenvalue(G0, l) - exact) / std::abs(exact));
    }
    detail::push(out, make_report("G0 vs closed form", worst, 1e-8, n), ctx);
  }
  return out;
}

inline CommandOutput dispatch(const std::string& command, const ExperimentConfig& c) {
  if (command == "verify") return cmd_verify(c);
  if (command == "spectrum") return cmd_spectrum(c);
  if (command == "reconstruct") return cmd_reconstruct(c);
  if (command == "invert") return cmd_invert(c);
  if (command == "scan") return cmd_scan(c);
  if (command == "disk-analytic") return cmd_disk_analytic(c);
  throw ConfigError("unknown command '" + command + "'");
}

struct RunResult {
  int exit_code = kPass;
  std::string message;
  CommandOutput output;
};

/// Parses, runs and writes report.json plus CSVs into `out_dir`.
inline RunResult run(const std::string& command, const nlohmann::json& config_json, const std::string& out_dir) {
  RunResult rr;
  ExperimentConfig cfg;
  try {
    if (!known_commands().count(command)) throw ConfigError("unknown command '" + command + "'");
    cfg = parse_config(config_json);
    const auto t0 = std::chrono::steady_clock::now();
    rr.output = dispatch(command, cfg);
    io::Timing timing;
    timing.recorded = cfg.record_timing;
    timing.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::filesystem::create_directories(out_dir);
    const auto report =
        io::make_report_json(command, io::fnv1a_hex(config_json.dump()), rr.output.reports, timing);
    io::write_text((std::filesystem::path(out_dir) / "report.json").string(), report.dump(2) + "\n");
    for (const auto& [file, tab] : rr.output.tables) tab.write((std::filesystem::path(out_dir) / file).string());
    rr.exit_code = rr.output.all_pass() ? kPass : kCheckFailed;
  } catch (const ConfigError& e) {
    rr.exit_code = kConfigError;
    rr.message = std::string("config error: ") + e.what();
  } catch (const Error& e) {
    rr.exit_code = kPreconditionError;
    rr.message = "numerical precondition failed [" + (e.stage().empty() ? std::string("unstaged") : e.stage()) +
                 "]: " + e.what();
  }
  return rr;
}

}  // namespace imgreen::cli
