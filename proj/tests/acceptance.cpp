// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "imgreen/imgreen.hpp"

using namespace imgreen;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string sci(double x) { return fmt("%.2e", x); }

Potential on_grid(const PotentialSpec& spec, const BoundaryMesh& mesh, const VolumeGrid& grid) {
  return sample_potential(grid, family_field(spec, inner_radius(mesh)), spec.name());
}

BoundaryMesh star() { return make_star(1.0, {{3, 0.2}}, 128); }

// 1 -------------------------------------------------------------------------

Outcome circle_golden() {
  const double k = 1.0, R = 1.0;
  const int n = 128;
  const BoundaryMesh mesh = make_circle(R, n);
  const DirectionGrid dirs = make_directions(n);
  const BoundaryOperator G0 = assemble_G0(mesh, k);
  const BoundaryOperator T = assemble_T(mesh, k, dirs);
  double g_err = 0.0, t_err = 0.0;
  for (int l = 0; l <= n / 4; ++l) {
    g_err = std::max(g_err, std::abs(fourier_eigenvalue(G0, l) - circle::g0(k, R, l)) / std::abs(circle::g0(k, R, l)));
    t_err = std::max(t_err, std::abs(fourier_eigenvalue(T, l) - circle::t(k, R, l)) / T.norm());
  }
  const BoundaryOperator Q = -1.0 * (T.adjoint() * T);
  const double q_err = relative_distance(assemble_Q(G0), Q, Q);
  return {g_err < 1e-8 && t_err < 1e-6 && q_err < 1e-6,
          "G0 modes " + sci(g_err) + ", T " + sci(t_err) + ", Q=-T*T " + sci(q_err)};
}

// 2, 3, 4 -------------------------------------------------------------------

struct CorpusRun {
  double abq = 0.0, abq_coarse_worst = 0.0, circle_law = 0.0, unitarity = 0.0;
  bool orders_ok = true;
};

CorpusRun corpus_identities(double k) {
  CorpusRun out;
  const BoundaryMesh fine = star(), coarse = make_star(1.0, {{3, 0.2}}, 64);
  const VolumeGrid grid = make_grid(fine, 1.0 / 12);
  auto Q_for = [&](const BoundaryMesh& m) {
    const BoundaryOperator T = assemble_T(m, k, make_directions(m.size()));
    return BoundaryOperator(-1.0 * (T.adjoint() * T));
  };
  const BoundaryOperator Qf = Q_for(fine), Qc = Q_for(coarse);
  const BoundaryOperator Tf = assemble_T(fine, k, make_directions(128));
  for (const PotentialSpec& spec : test_corpus()) {
    const Potential v = on_grid(spec, fine, grid);
    const BoundaryOperator Gf = assemble_Gv(fine, grid, v, k), Gc = assemble_Gv(coarse, grid, v, k);
    const auto [f1, f2] = check_ABQ(Gf.re(), Gf.im(), Qf);
    const auto [c1, c2] = check_ABQ(Gc.re(), Gc.im(), Qc);
    out.abq = std::max({out.abq, f1.residual, f2.residual});
    out.abq_coarse_worst = std::max({out.abq_coarse_worst, c1.residual, c2.residual});
    out.orders_ok = out.orders_ok && convergence_order(c1.residual, f1.residual).pass &&
                    convergence_order(c2.residual, f2.residual).pass;
    const BoundaryOperator Gt = assemble_Gv_tilde(Tf, Gf);
    out.circle_law = std::max(out.circle_law, check_circle_law(Gt).residual);
    out.unitarity = std::max(out.unitarity, check_unitarity(scattering_matrix(Gt)).residual);
  }
  return out;
}

Outcome identities(const CorpusRun& r) {
  return {r.abq < 1e-4 && r.orders_ok,
          "worst residual n=128 " + sci(r.abq) + " (n=64 " + sci(r.abq_coarse_worst) + "), order rule " +
              (r.orders_ok ? "met" : "violated")};
}

Outcome circle_law(const CorpusRun& r) {
  return {r.circle_law < 1e-4 && r.unitarity < 4e-4,
          "max ||lambda-i/2|-1/2| " + sci(r.circle_law) + ", unitarity defect " + sci(r.unitarity)};
}

Outcome stone_reciprocity() {
  const double k = 1.0;
  const BoundaryMesh mesh = star();
  const DirectionGrid dirs = make_directions(128);
  const VolumeGrid grid = make_grid(mesh, 1.0 / 12);
  const BoundaryOperator T = assemble_T(mesh, k, dirs);
  double st = 0.0, mr = 0.0;
  for (const PotentialSpec& spec : {PotentialSpec{"zero", 0.0}, PotentialSpec{"gaussian", 0.5},
                                    PotentialSpec{"subdisk", 0.5}}) {
    const Potential v = on_grid(spec, mesh, grid);
    const BoundaryOperator Gv = assemble_Gv(mesh, grid, v, k);
    st = std::max(st, check_stone(Gv.im(), herglotz_imgv(mesh, grid, v, k, dirs)).residual);
    mr = std::max(mr, check_mixed_reciprocity(reflected_conj_herglotz_adjoint(mesh, grid, v, k, dirs), T, Gv, k).residual);
  }
  return {st < 1e-3 && mr < 1e-3, "Stone " + sci(st) + ", mixed reciprocity " + sci(mr)};
}

// 5 -------------------------------------------------------------------------

Outcome kramers_kronig() {
  const KramersKronigResult d3 = check_kramers_kronig_free(3, 1.0, 1.0, 200.0, 0.02);
  const KramersKronigResult d2 = check_kramers_kronig_free(2, 1.0, 1.0, 100.0, 0.05);
  return {d3.report.pass && d2.report.pass,
          "d=3 " + fmt("%.3f%%", 100 * d3.report.residual) + ", d=2 " + fmt("%.3f%%", 100 * d2.report.residual)};
}

// 6 -------------------------------------------------------------------------

Outcome reconstruction() {
  const double k = 2.0;
  const BoundaryMesh mesh = make_circle(1.0, 64);
  const DirectionGrid dirs = make_directions(64);
  const VolumeGrid grid = make_grid(mesh, 1.0 / 18), data = make_grid(mesh, 1.0 / 36);
  const CoarseBasis basis = make_coarse_basis(mesh, grid, 12);
  const PotentialSpec spec{"bump", 0.05};
  const BoundaryOperator G = assemble_Gv(mesh, data, on_grid(spec, mesh, data), k);
  const Potential v0 = on_grid({"zero", 0.0}, mesh, grid);
  const PipelineResult res = imag_only_recover_v(G.im(), mesh, grid, basis, v0, k, dirs);
  const BoundaryOperator At = assemble_Gv_tilde(assemble_T(mesh, k, dirs), G).re();
  const double a_err = relative_distance(res.reconstruction.A_tilde, At, At);
  const double v_err = coarse_relative_error(basis, res.inversion.coefficients, on_grid(spec, mesh, grid));
  const double margin = res.reconstruction.signs.min_margin;
  return {a_err < 1e-3 && v_err < 0.15 && margin >= 0.25,
          "A~ " + sci(a_err) + ", v " + fmt("%.1f%%", 100 * v_err) + ", min margin " + fmt("%.3f", margin)};
}

// 7 -------------------------------------------------------------------------

CMatrix random_hermitian(int n, std::mt19937_64& eng) {
  std::normal_distribution<double> nd;
  CMatrix M(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) M(i, j) = cplx(nd(eng), nd(eng));
  }
  return 0.5 * (M + M.adjoint());
}

RVector negative_eigenvalues(const BoundaryOperator& A, double eps = 1e-10) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_normalized(A), Eigen::EigenvaluesOnly);
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<double> neg;
  for (double l : es.eigenvalues()) {
    if (l < -eps * scale) neg.push_back(l);
  }
  return Eigen::Map<RVector>(neg.data(), static_cast<Eigen::Index>(neg.size()));
}

Outcome inertia_suite() {
  const double k = 2.0;
  // Rank equality under T-conjugation, where the rank is stable under n -> 2n.
  int compared = 0, mismatches = 0;
  const VolumeGrid grid = make_grid(star(), 1.0 / 12);
  for (const PotentialSpec& spec : test_corpus()) {
    int rank_A[2], rank_At[2];
    for (int level = 0; level < 2; ++level) {
      const BoundaryMesh mesh = make_star(1.0, {{3, 0.2}}, 64 << level);
      const BoundaryOperator G = assemble_Gv(mesh, grid, on_grid(spec, mesh, grid), k);
      rank_A[level] = inertia_rank(G.re());
      rank_At[level] = inertia_rank(assemble_Gv_tilde(assemble_T(mesh, k, make_directions(mesh.size())), G).re());
    }
    if (rank_A[0] != rank_A[1] || rank_At[0] != rank_At[1]) continue;
    ++compared;
    mismatches += rank_A[1] != rank_At[1];
  }

  // Finite-rank perturbation bound n2 <= n1 + rk K.
  std::mt19937_64 eng(2024);
  std::uniform_int_distribution<int> rk(1, 4);
  int violations = 0;
  const Space s = boundary_space(RVector::Ones(12));
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix A1 = random_hermitian(12, eng);
    const int r = rk(eng);
    CMatrix K = CMatrix::Zero(12, 12);
    for (int i = 0; i < r; ++i) {
      const CVector u = random_hermitian(12, eng).col(0);
      K += (trial % 2 ? -1.0 : 1.0) * 3.0 * u * u.adjoint();
    }
    const int n1 = inertia_rank(BoundaryOperator(A1, s, s));
    const int n2 = inertia_rank(BoundaryOperator(A1 + K, s, s));
    violations += n2 > n1 + r;
  }

  // Negative eigenvalues of Re G~_v near those of Re G~_{v0} as ||v - v0|| shrinks.
  const BoundaryMesh mesh = make_circle(1.0, 64);
  const VolumeGrid g = make_grid(mesh, 1.0 / 12);
  const BoundaryOperator T = assemble_T(mesh, k, make_directions(64));
  const RVector ref = negative_eigenvalues(assemble_Gv_tilde(T, assemble_G0(mesh, k)).re());
  std::vector<double> sigma;
  bool counts_ok = ref.size() > 0;
  for (double delta : {0.1, 0.05, 0.01}) {
    const RVector neg =
        negative_eigenvalues(assemble_Gv_tilde(T, assemble_Gv(mesh, g, on_grid({"bump", delta}, mesh, g), k)).re());
    counts_ok = counts_ok && neg.size() == ref.size();
    double worst = 0.0;
    for (double l : neg) worst = std::max(worst, (ref.array() - l).abs().minCoeff());
    sigma.push_back(worst);
  }
  const bool shrinking = sigma[0] > sigma[1] && sigma[1] > sigma[2];
  return {compared > 0 && mismatches == 0 && violations == 0 && counts_ok && shrinking,
          "T-conjugation ranks equal on " + std::to_string(compared - mismatches) + "/" + std::to_string(compared) +
              " stable cases, " + std::to_string(violations) + " bound violations in 100 trials, sigma " +
              sci(sigma[0]) + " > " + sci(sigma[1]) + " > " + sci(sigma[2])};
}

// 8 -------------------------------------------------------------------------

Outcome small_frequency() {
  const BoundaryMesh mesh = make_circle(1.0, 64);
  const DirectionGrid dirs = make_directions(64);
  const VolumeGrid grid = make_grid(mesh, 1.0 / 18), data = make_grid(mesh, 1.0 / 36);
  const OmegaZeroScan scan = scan_omega_zero(mesh, make_grid(mesh, 1.0 / 12), 2.0, 0.1, 1.5, 14, 12, dirs);

  const double omega = 0.3;
  const CoarseBasis basis = make_coarse_basis(mesh, grid, 12);
  const Field pert = family_field({"bump", 0.3}, 1.0);
  auto kappa_on = [&](const VolumeGrid& g) {
    return sample_potential(g, [&](const Vec2& x) { return 1.0 + pert(x); }, "kappa");
  };
  const BoundaryOperator P = assemble_Gv(mesh, data, helmholtz_potential(kappa_on(data), omega), omega);
  const HelmholtzResult res = helmholtz_small_freq_recover(P.im(), mesh, grid, basis, omega, dirs);
  const Potential kappa = kappa_on(grid);
  // Cells without an unknown keep kappa = 1.
  Potential kappa_m1 = kappa;
  kappa_m1.values.array() -= 1.0;
  const RVector avg = basis.coarse_averages(kappa);
  double num = 0.0, den = 0.0;
  for (int a = 0; a < basis.num_coarse(); ++a) {
    if (std::isnan(avg[a])) continue;
    const int q = basis.param_of_coarse[a];
    const double rec = q >= 0 ? res.kappa_coefficients[q] : 1.0;
    num += (rec - avg[a]) * (rec - avg[a]);
    den += avg[a] * avg[a];
  }
  const double kappa_rel = std::sqrt(num / den);
  const double im_only_pert = coarse_relative_error(basis, (res.kappa_coefficients.array() - 1.0).matrix(), kappa_m1);
  const Potential zero = sample_potential(grid, [](const Vec2&) { return 0.0; });
  const InversionResult full = recover_v(P, mesh, grid, basis, zero, omega);
  const double full_pert = coarse_relative_error(basis, (-full.coefficients / (omega * omega)).eval(), kappa_m1);

  const DecaySlope w = w_decay_slope(mesh, 1e-3, 1e-1, 9);
  const bool ok = scan.omega0 > 0.0 && kappa_rel < 0.15 && full_pert < 0.15 &&
                  std::abs(w.log_corrected_slope - 2.0) <= 0.1;
  return {ok, "omega_0 " + fmt("%.4f", scan.omega0) + ", kappa " + fmt("%.1f%%", 100 * kappa_rel) +
                  " (kappa-1: full data " + fmt("%.1f%%", 100 * full_pert) + ", Im only " +
                  fmt("%.0f%%", 100 * im_only_pert) + "), W slope " + fmt("%.2f", w.slope) + " raw / " +
                  fmt("%.2f", w.log_corrected_slope) + " log-corrected"};
}

// 9 -------------------------------------------------------------------------

Outcome acoustic() {
  const ManufacturedMedium med;
  double worst = 1e300;
  std::string detail;
  for (const auto& [name, mesh] : {std::pair{"circle", make_circle(1.0, 64)},
                                   std::pair{"star", make_star(1.0, {{3, 0.15}}, 64)}}) {
    const AcousticConvergence c = acoustic_convergence(med, mesh, 1.0 / 20, 3, 0.7, 1.3);
    worst = std::min({worst, c.rho_slope, c.kappa_slope});
    detail += std::string(detail.empty() ? "" : ", ") + name + " rho " + fmt("%.2f", c.rho_slope) + " kappa " +
              fmt("%.2f", c.kappa_slope);
  }
  return {worst >= 1.8, "slopes " + detail};
}

// 10 ------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "imgreen_acceptance";
  int files = 0, differing = 0;
  for (const char* cmd : {"verify", "spectrum", "scan", "disk-analytic"}) {
    std::string cfg = std::string(IMGREEN_CONFIG_DIR) + "/" +
                      (std::string(cmd) == "verify" ? "verify_circle" : std::string(cmd) == "disk-analytic"
                                                                           ? "disk_analytic"
                                                                           : cmd) +
                      ".json";
    fs::path dirs[2];
    for (int rep = 0; rep < 2; ++rep) {
      dirs[rep] = root / (std::string(cmd) + "_" + std::to_string(rep));
      fs::remove_all(dirs[rep]);
      const std::string line = std::string(IMGREEN_CLI) + " " + cmd + " " + cfg + " --out " + dirs[rep].string() +
                               " > /dev/null 2>&1";
      if (std::system(line.c_str()) != 0) return {false, std::string(cmd) + " did not exit 0"};
    }
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      ++files;
      differing += slurp(e.path()) != slurp(dirs[1] / e.path().filename());
    }
  }
  return {files > 0 && differing == 0,
          std::to_string(files) + " output files over 4 commands, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  CorpusRun corpus;
  bool corpus_done = false;
  auto corpus_once = [&]() -> const CorpusRun& {
    if (!corpus_done) corpus = corpus_identities(1.0);
    corpus_done = true;
    return corpus;
  };
  const std::vector<Criterion> criteria{
      {"circle golden values", circle_golden},
      {"boundary operator identities", [&] { return identities(corpus_once()); }},
      {"circle law and unitarity", [&] { return circle_law(corpus_once()); }},
      {"Stone factorization and mixed reciprocity", stone_reciprocity},
      {"Kramers-Kronig", kramers_kronig},
      {"reconstruction from Im G", reconstruction},
      {"inertia suite", inertia_suite},
      {"small-frequency regime", small_frequency},
      {"acoustic pipeline", acoustic},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str(), sec);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
