#include <doctest.h>

#include "wrinkle/cascade.hpp"
#include "wrinkle/fvk.hpp"
#include "wrinkle/solver.hpp"

#include <cmath>

using namespace wrinkle;

TEST_CASE("cutoff profile") {
  CutoffProfile phi = cutoff(0.1);
  CHECK(phi.value(0.025) == 0.0);   // delta/4
  CHECK(phi.value(0.2) == 1.0);     // 2 delta
  CHECK(phi.value(0.05) == 0.0);
  CHECK(phi.value(0.1) == 1.0);
  double prev = -1.0;
  double sup_d = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = 0.3 * i / 400;
    CHECK(phi.value(x) >= prev);  // monotone
    prev = phi.value(x);
    sup_d = std::max(sup_d, std::abs(phi.deriv(x)));
  }
  // max |phi'| * delta is a property of the fixed profile
  CutoffProfile phi2 = cutoff(0.01);
  double sup_d2 = 0.0;
  for (int i = 0; i <= 4000; ++i)
    sup_d2 = std::max(sup_d2, std::abs(phi2.deriv(0.03 * i / 4000)));
  CHECK(sup_d * 0.1 == doctest::Approx(sup_d2 * 0.01).epsilon(1e-2));
  CHECK_THROWS_AS(cutoff(1.5), std::invalid_argument);
}

TEST_CASE("planar and zero deformations have closed-form energies") {
  for (double L : {1.0, 4.0}) {
    EnergyBreakdown p = evaluate_EL(planar_deformation(L, 256, 128));
    CHECK(p.total() == doctest::Approx(-4.0 / 3.0).epsilon(1e-12));
    CHECK(p.t1a == doctest::Approx(0.0));
    CHECK(p.t1c == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(p.t2 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(p.t3 == doctest::Approx(0.0));

    EnergyBreakdown z = evaluate_EL(zero_deformation(L, 256, 128));
    CHECK(z.total() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(z.t1a == doctest::Approx(2.0).epsilon(1e-12));
  }
}

namespace {

DeformationField assembled_fixture(int n_copies, double L0 = 2.0) {
  FrequencyGrid freq = FrequencyGrid::with_default_cap(L0);
  XGrid grid = XGrid::graded_unit(256, 2.0);
  CascadeBuild casc = build_cascade(freq, grid, 1.0);
  SolveOptions o;
  o.grad_tol = 1e-7;
  o.max_iters = 4000;
  o.restarts = 0;
  o.k_top = 48;
  SolveResult r = minimize(casc.field, o);
  CoefficientField u = truncate_modes(r.field, 1e-4);
  const double L = n_copies * L0;
  return assemble_upper_bound(u, n_copies, 1.0 / L, 256, 768);
}

}  // namespace

TEST_CASE("assembled deformation: structure of the construction") {
  DeformationField d = assembled_fixture(4);
  const double L = d.L;
  const double delta = 1.0 / L;
  CHECK(d.periodicity_mismatch() < 1e-10);

  // below delta/2 (one stencil width in) the deformation is planar exactly
  const double hx = d.hx();
  for (int i = 0; i <= d.nx(); ++i) {
    const double x = d.x[i];
    if (x > delta / 2 - 2 * hx) continue;
    CHECK(d.u3.row(i).abs().maxCoeff() == 0.0);
    CHECK(d.w2.row(i).abs().maxCoeff() == 0.0);
    CHECK((d.w1.row(i) - x).abs().maxCoeff() < 1e-13);
  }

  EnergyBreakdown e = evaluate_EL(d);
  CHECK(e.t3 < 1e-12);                       // shear term vanishes identically
  CHECK(e.t2 <= delta * delta * delta / 3 + 1e-10);
  CHECK(e.t1a >= 0.0);
  CHECK(e.t1c >= 0.0);
  CHECK(e.total() > -5.0 / 3.0);

  // transverse mismatch on [-1,0] equals 1/3 up to quadrature
  CHECK(e.t1c == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("unrescale round trip and the physical evaluator") {
  DeformationField d = assembled_fixture(2);
  PhysicalDeformation p = unrescale(d);
  CHECK(p.h == doctest::Approx(1.0 / (d.L * d.L)));
  DeformationField back = rescale_deformation(p);
  CHECK((back.w1 - d.w1).abs().maxCoeff() < 1e-12);
  CHECK((back.w2 - d.w2).abs().maxCoeff() < 1e-12);
  CHECK((back.u3 - d.u3).abs().maxCoeff() < 1e-12);

  // the two evaluators agree through the rescaling identity
  const double eh = evaluate_Eh(p);
  const double el = evaluate_EL(d).total();
  CHECK(std::abs(eh - el) / std::abs(el) < 1e-8);

  // planar field: E_h = -4/3 for every h
  for (double L : {2.0, 16.0}) {
    PhysicalDeformation pp = unrescale(planar_deformation(L, 128, 64));
    CHECK(evaluate_Eh(pp) == doctest::Approx(-4.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("deformation validation catches bad inputs") {
  DeformationField d = planar_deformation(2.0, 128, 64);
  d.w2(4, 7) = 1.0;  // interior change keeps the closure intact
  CHECK_NOTHROW(d.validate());
  d.w2(4, 0) = 0.5;  // closure mismatch
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);

  DeformationField e = planar_deformation(2.0, 128, 64);
  e.k_max_hint = 1e9;  // Nyquist violation
  CHECK_THROWS_AS(e.validate(), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_EL(e), std::invalid_argument);
}
