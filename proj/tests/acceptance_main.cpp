// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Tolerances are fixed here, not calibrated at run time.

#include "wrinkle/cascade.hpp"
#include "wrinkle/experiments.hpp"
#include "wrinkle/repair.hpp"
#include "wrinkle/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <vector>

using namespace wrinkle;
namespace fs = std::filesystem;

namespace {

struct Harness {
  int failures = 0;

  void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("criterion %2d [%s]: %s  (%s)\n", id, name, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

double check_margin(const CheckReport& rep, const std::string& name) {
  for (const auto& it : rep.items)
    if (it.name == name) return it.margin;
  return -1e300;
}

double check_observed(const CheckReport& rep, const std::string& name) {
  for (const auto& it : rep.items)
    if (it.name == name) return it.observed;
  return -1e300;
}

}  // namespace

int main() {
  Harness h;
  const auto t_start = std::chrono::steady_clock::now();

  // ---- 1. cascade feasibility -------------------------------------------
  {
    CascadeProfile prof = build_profile();
    const double ident = prof.partition_residual(10000);

    FrequencyGrid freq = FrequencyGrid::with_default_cap(1.0);
    XGrid grid = XGrid::graded_unit(256, 2.0);
    CascadeBuild c = build_cascade(freq, grid, 1.0);
    const ArrayXd r = constraint_residual(c.field);
    double worst = 0.0;
    for (int i = 1; i < grid.size(); ++i)
      if (grid.node(i) >= c.resolved_from)
        worst = std::max(worst, std::abs(r[i]));

    h.report(1, "cascade feasibility", worst <= 1e-10 && ident <= 1e-12,
             fmt("max residual %.2e (<=1e-10), identity %.2e (<=1e-12)", worst,
                 ident));
  }

  // ---- 2. planar FvK baseline --------------------------------------------
  {
    EnergyBreakdown e = evaluate_EL(planar_deformation(4.0, 512, 512));
    const double third = 1.0 / 3.0;
    const bool pass = std::abs(e.total() + 4.0 / 3.0) <= 1e-6 &&
                      std::abs(e.t1c - third) <= 1e-6 &&
                      std::abs(e.t2 - third) <= 1e-6;
    h.report(2, "planar baseline", pass,
             fmt("total %.12f, t1c %.12f, t2 %.12f", e.total(), e.t1c, e.t2));
  }

  // shared solver laboratory for criteria 3-9
  ExperimentConfig cfg;
  cfg.grid.n = 1024;
  cfg.solver.grad_tol = 1e-8;
  cfg.solver.max_iters = 6000;
  cfg.solver.restarts = 2;
  cfg.solver.k_top = 128;
  SigmaLab lab(cfg);

  // ---- 3. sigma inequality suite ----------------------------------------
  {
    const std::vector<double> base = {1, 1.5, 2, 3, 4, 8};
    const double tol = 1e-3;
    bool pass = true;
    std::ostringstream os;
    for (double L : base) {
      const double sL = lab.solve(L).sigma_estimate;
      const double s2L = lab.solve(2 * L).sigma_estimate;
      const double s15L = lab.solve(1.5 * L).sigma_estimate;
      const bool dbl = s2L <= sL * (1 + tol);
      const bool scl = s15L <= 2.25 * sL * (1 + tol);
      pass = pass && dbl && scl;
      if (!dbl) os << " 2L@" << L;
      if (!scl) os << " 1.5L@" << L;
    }
    const double s1 = lab.solve(1.0).sigma_estimate;
    for (double L : base) {
      const bool cap = lab.solve(L).sigma_estimate <= 4 * s1 * (1 + tol);
      pass = pass && cap;
      if (!cap) os << " 4s1@" << L;
    }
    h.report(3, "sigma inequalities", pass,
             fmt("sigma_1 %.6f sigma_2 %.6f sigma_4 %.6f sigma_8 %.6f sigma_16 "
                 "%.6f%s",
                 s1, lab.solve(2.0).sigma_estimate, lab.solve(4.0).sigma_estimate,
                 lab.solve(8.0).sigma_estimate, lab.solve(16.0).sigma_estimate,
                 os.str().c_str()));
  }

  // ---- 4. Euler-Lagrange residual and refinement -------------------------
  {
    // both resolutions descend in the dyadic-tower basin so that the
    // residual comparison measures pure discretization error
    auto solve_at = [&](int n) {
      XGrid grid = XGrid::graded_unit(n, 2.0);
      FrequencyGrid freq(1.0, octave_mode_cap(1.0, grid.node(1)));
      CascadeBuild casc = build_cascade(freq, grid, 1.0);
      SolveOptions o = cfg.solver;
      o.restarts = 0;
      o.fill_modes = false;
      o.max_iters = 20000;
      return minimize(casc.field, o);
    };
    SolveResult rN = solve_at(1024);
    SolveResult r2N = solve_at(2048);
    const double eN = rN.el.interior_aggregate;
    const double e2N = r2N.el.interior_aggregate;
    const bool pass = rN.converged && r2N.converged && eN <= 1e-4 &&
                      e2N <= 1e-4 && e2N <= 0.5 * eN;
    h.report(4, "EL residual", pass,
             fmt("N=1024: %.3e (conv %d), N=2048: %.3e (conv %d), ratio %.3f "
                 "(<=0.5)",
                 eN, rN.converged, e2N, r2N.converged,
                 eN > 0 ? e2N / eN : 0.0));
  }

  const SolveResult& r1 = lab.solve(1.0);
  const CheckReport checks1 = structural_checks(r1, cfg.solver);

  // ---- 5. multiplier identities ------------------------------------------
  {
    const double id_margin = check_margin(checks1, "multiplier_identity");
    const double lmin = check_margin(checks1, "lambda_nonnegative");
    const double dy = check_margin(checks1, "lambda_dyadic_lower");
    const bool pass = id_margin >= 0.0 && lmin >= 0.0 && dy >= 0.0;
    h.report(5, "multiplier identities", pass,
             fmt("identity rel %.4f (<=0.02), min lambda %.2e, dyadic slack "
                 "%.3f",
                 check_observed(checks1, "multiplier_identity"), lmin, dy));
  }

  // ---- 6. mu structure ----------------------------------------------------
  {
    const double mb = check_margin(checks1, "mu_bounds");
    const double mo = check_margin(checks1, "mu_ordering");
    h.report(6, "mu structure", mb >= 0.0 && mo >= 0.0,
             fmt("bounds slack %.2e, ordering slack %.2e", mb, mo));
  }

  // ---- 7. mode structure ---------------------------------------------------
  {
    const CheckReport checks4 = structural_checks(lab.solve(4.0), cfg.solver);
    const double triv1 = check_margin(checks1, "low_mode_vanishing");
    const double triv4 = check_margin(checks4, "low_mode_vanishing");
    const double small1 = check_margin(checks1, "smallest_active_mode");
    const double small4 = check_margin(checks4, "smallest_active_mode");
    const double gap1 = check_observed(checks1, "gap_ratio");
    const double gap4 = check_observed(checks4, "gap_ratio");
    const bool pass = triv1 >= 0 && triv4 >= 0 && small1 >= 0 && small4 >= 0 &&
                      std::isfinite(gap1) && std::isfinite(gap4);
    h.report(7, "mode structure", pass,
             fmt("trivial-mode slack %.2e/%.2e, smallest-mode slack %.2f/%.2f, "
                 "gap ratio %.3f/%.3f (observed)",
                 triv1, triv4, small1, small4, gap1, gap4));
  }

  // ---- 8. regularity stability --------------------------------------------
  {
    RegularityReport rep1 = regularity_report(lab.solve(1.0).field, 1e-3);
    RegularityReport rep2 = regularity_report(lab.solve(2.0).field, 1e-3);
    RegularityReport rep4 = regularity_report(lab.solve(4.0).field, 1e-3);
    bool pass = true;
    std::ostringstream os;
    for (size_t i = 0; i < rep1.entries.size(); ++i) {
      const double a = rep1.entries[i].fitted_constant;
      const double b = rep2.entries[i].fitted_constant;
      const double c = rep4.entries[i].fitted_constant;
      const double hi = std::max({a, b, c});
      const double lo = std::min({a, b, c});
      const double ratio = (lo > 0) ? hi / lo : 1e300;
      os << " " << rep1.entries[i].name << ":" << fmt("%.2f", ratio);
      if (ratio > 3.0) pass = false;
    }
    h.report(8, "regularity stability", pass,
             "max/min fitted-constant ratio across L in {1,2,4}:" + os.str());
  }

  // ---- 9. scaling law -------------------------------------------------------
  {
    const double sigma4 = lab.solve(4.0).sigma_estimate;
    const CoefficientField source = truncate_modes(lab.solve(4.0).field, 1e-4);
    const double k_max = source.wavenumbers().maxCoeff();
    int ny = std::max(512, (int(std::ceil(4.4 * 4.0 * k_max / M_PI)) + 3) / 4 * 4);

    bool bracket = true, mono = true, cert_ok = true;
    double prev = 1e300;
    std::ostringstream os;
    for (double L : {8.0, 16.0, 32.0}) {
      const int n_copies = static_cast<int>(L / 4.0);
      DeformationField d = assemble_upper_bound(source, n_copies, 1.0 / L, 512, ny);
      const double excess = L * L * (evaluate_EL(d).total() - kRelaxedEnergyMinimum);
      const double sigmaL = lab.solve(L).sigma_estimate;
      const double cert = lower_bound_certificate(d, sigmaL);
      bracket = bracket && excess > 0.0 && excess <= sigma4 * 1.15;
      mono = mono && excess <= prev * 1.05;
      cert_ok = cert_ok && cert >= -0.05 * sigmaL;
      prev = excess;
      os << fmt(" L=%g: excess %.4f cert %.3f;", L, excess, cert);
    }
    h.report(9, "scaling law", bracket && mono && cert_ok,
             fmt("sigma_4 %.4f, bracket %s, nonincreasing %s, certificate %s |",
                 sigma4, bracket ? "ok" : "VIOLATED", mono ? "ok" : "VIOLATED",
                 cert_ok ? "ok" : "VIOLATED") +
                 os.str());
  }

  // ---- 10. repair ------------------------------------------------------------
  {
    ExperimentConfig rc;
    rc.L_list = {4, 16, 64};
    rc.grid.n = 256;
    rc.cascade_scale = 0.9;
    rc.out_dir = (fs::temp_directory_path() / "wlab_acc_repair").string();
    fs::remove_all(rc.out_dir);
    auto rows = repair_trend(rc);
    bool margins = true, decreasing = true;
    double prev = 1e300;
    std::ostringstream os;
    for (const auto& row : rows) {
      margins = margins && row.budget.feasibility_margin >= -1e-10;
      decreasing = decreasing && row.budget.delta_hat < prev;
      prev = row.budget.delta_hat;
      os << fmt(" L=%g: delta %.3f margin %.1e;", row.L, row.budget.delta_hat,
                row.budget.feasibility_margin);
    }
    h.report(10, "repair", margins && decreasing, os.str());
  }

  // ---- 11. determinism --------------------------------------------------------
  {
    auto tiny = [](const std::string& dir) {
      ExperimentConfig c;
      c.L_list = {1.0};
      c.grid.n = 1024;
      c.solver.grad_tol = 1e-6;
      c.solver.max_iters = 1500;
      c.solver.restarts = 1;
      c.solver.k_top = 64;
      c.out_dir = dir;
      return c;
    };
    const std::string d1 = (fs::temp_directory_path() / "wlab_acc_det1").string();
    const std::string d2 = (fs::temp_directory_path() / "wlab_acc_det2").string();
    fs::remove_all(d1);
    fs::remove_all(d2);
    sigma_scan(tiny(d1));
    sigma_scan(tiny(d2));
    bool same = true;
    for (const auto& entry : fs::directory_iterator(d1)) {
      const std::string name = entry.path().filename().string();
      if (!fs::exists(fs::path(d2) / name) ||
          read_text_file(entry.path().string()) !=
              read_text_file((fs::path(d2) / name).string()))
        same = false;
    }
    h.report(11, "determinism", same,
             same ? "identical bytes across reruns" : "outputs differ");
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  std::printf("acceptance: %d of 11 criteria failed (%.0f s)\n", h.failures,
              elapsed);
  return h.failures == 0 ? 0 : 1;
}
