#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wrinkle/cascade.hpp"
#include "wrinkle/experiments.hpp"
#include "wrinkle/repair.hpp"
#include "wrinkle/serialization.hpp"
#include "wrinkle/solver.hpp"

namespace py = pybind11;
using namespace wrinkle;

namespace {

CoefficientField field_of(const std::string& s) {
  return coefficient_field_from_json(json::parse(s));
}

py::dict energy_dict(const EnergySample& e) {
  py::dict d;
  d["total"] = e.total;
  d["membrane"] = e.membrane;
  d["bending"] = e.bending;
  return d;
}

}  // namespace

PYBIND11_MODULE(_wrinklelab, m) {
  m.doc() = "spectral laboratory for the stretched-film wrinkling scaling law";

  m.def("profile_partition_residual",
        [](int n_probe) { return build_profile().partition_residual(n_probe); },
        py::arg("n_probe") = 10000);

  m.def("build_cascade",
        [](double L, double b, int n_cells, double gamma) {
          FrequencyGrid freq = FrequencyGrid::with_default_cap(L);
          XGrid grid = XGrid::graded_unit(n_cells, gamma);
          CascadeBuild c = build_cascade(freq, grid, b);
          py::dict d;
          d["field"] = to_json(c.field).dump();
          d["resolved_from"] = c.resolved_from;
          d["resolved_to"] = c.resolved_to;
          d["support_cap"] = c.support_cap;
          d["truncation_residual"] = c.truncation_residual;
          return d;
        },
        py::arg("L"), py::arg("b") = 1.0, py::arg("n_cells") = 256,
        py::arg("gamma") = 2.0);

  m.def("energy", [](const std::string& f) { return energy_dict(energy(field_of(f))); });

  m.def("constraint_residual_max", [](const std::string& f) {
    return constraint_residual(field_of(f)).abs().maxCoeff();
  });

  m.def("combine", [](const std::string& a, const std::string& b) {
    return to_json(combine(field_of(a), field_of(b))).dump();
  });

  m.def("project_constraint", [](const std::string& f) {
    return to_json(project_constraint(field_of(f))).dump();
  });

  m.def("minimize",
        [](const std::string& init, double grad_tol, int max_iters, int restarts,
           std::uint64_t seed, double k_top) {
          SolveOptions o;
          o.grad_tol = grad_tol;
          o.max_iters = max_iters;
          o.restarts = restarts;
          o.seed = seed;
          o.k_top = k_top;
          SolveResult r = minimize(field_of(init), o);
          py::dict d;
          d["sigma"] = r.sigma_estimate;
          d["converged"] = r.converged;
          d["iterations"] = r.iterations;
          d["mu_atom"] = r.multiplier.mu_atom;
          d["el_residual"] = r.el.interior_aggregate;
          d["result"] = to_json(r).dump();
          return d;
        },
        py::arg("init"), py::arg("grad_tol") = 1e-6, py::arg("max_iters") = 40000,
        py::arg("restarts") = 1, py::arg("seed") = 0xC0FFEEULL,
        py::arg("k_top") = 128.0);

  m.def("structural_checks", [](const std::string& solve_result) {
    SolveResult r = solve_result_from_json(json::parse(solve_result));
    return to_json(structural_checks(r)).dump();
  });

  m.def("evaluate_el_planar", [](double L, int nx, int ny) {
    const EnergyBreakdown e = evaluate_EL(planar_deformation(L, nx, ny));
    py::dict d;
    d["total"] = e.total();
    d["t1a"] = e.t1a;
    d["t1c"] = e.t1c;
    d["t2"] = e.t2;
    return d;
  }, py::arg("L") = 4.0, py::arg("nx") = 256, py::arg("ny") = 256);

  m.def("repair_scaled_cascade",
        [](double L, double scale, int n_cells) {
          FrequencyGrid freq = FrequencyGrid::with_default_cap(L);
          XGrid unit = XGrid::graded_unit(n_cells, 2.0);
          XGrid sym = XGrid::symmetric_graded(n_cells, 2.0);
          CascadeBuild casc = build_cascade(freq, unit, 1.0);
          TwoSidedField v;
          v.freq = freq;
          v.grid = sym;
          v.sin_modes = casc.field.modes();
          v.sin_amp = ArrayXXd::Zero(sym.size(), casc.field.n_modes());
          for (int i = 0; i <= n_cells; ++i)
            v.sin_amp.row(n_cells + i) = scale * casc.field.amp().row(i);
          v.cos_amp.resize(sym.size(), 0);
          RepairResult r = repair(v, default_eta(L), unit);
          py::dict d;
          d["delta_hat"] = r.budget.delta_hat;
          d["feasibility_margin"] = r.budget.feasibility_margin;
          d["penalty"] = r.budget.penalty_value;
          d["energy_out"] = r.budget.energy_out;
          return d;
        },
        py::arg("L"), py::arg("scale") = 0.9, py::arg("n_cells") = 256);

  m.attr("E0") = kRelaxedEnergyMinimum;
}
