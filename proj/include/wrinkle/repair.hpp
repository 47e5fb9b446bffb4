#pragma once

#include "wrinkle/field.hpp"
#include "wrinkle/fvk.hpp"

namespace wrinkle {

/// Measured accounting of one repair run. delta_hat is the observed slack of
/// energy(out) <= energy(in) + penalty + delta; the comp_* fields are the
/// three vanishing bound components L^-1 eta^-3/2, eta^2/3, L^-1 eta^-5/6.
struct RepairBudget {
  double eta = 0.0;
  double penalty_value = 0.0;
  double energy_in = 0.0;
  double energy_c = 0.0;   // mollified + ramped part
  double energy_d = 0.0;   // cascade + single-mode compensation
  double energy_out = 0.0; // combined output (<= energy_c + energy_d)
  double delta_hat = 0.0;  // energy_out - energy_in - penalty_value
  double deficit_max = 0.0;     // max r on [eta^2/3, 1]
  double deficit_fit = 0.0;     // fitted C in r <= 4 eta + C L^-1 eta^-1/2
  double feasibility_margin = 0.0;  // min of (sum g^2 k^2 - 2x) over nodes
  double comp_l_eta_32 = 0.0;
  double comp_eta_23 = 0.0;
  double comp_l_eta_56 = 0.0;
};

struct RepairResult {
  CoefficientField field;
  RepairBudget budget;
};

/// eta policy used throughout: min(L^-1/2, pi^-6/2).
double default_eta(double L);

/// L^2 * int_{-1}^{1} (avg_y v_y^2 / 2 - Upsilon(x))^2 dx with
/// Upsilon(x) = x for x in [0,1] and 0 below.
double penalty(const TwoSidedField& v);

/// Turn an arbitrary 2L-periodic field on [-1,1] into a member of the
/// relaxed admissible class (sum g^2 k^2 >= 2x, g(0) = 0): mollify, zero the
/// low modes, ramp near 0, compensate the deficit with a cascade at
/// b = eta^2/3 plus one mode k0 in [eta^-1/6, 2 eta^-1/6].
RepairResult repair(const TwoSidedField& v, double eta, const XGrid& out_grid);
RepairResult repair(const TwoSidedField& v, double eta);

/// L^2 (E_L(w,u3) - E_0) + delta_hat - sigma_hat_L, nonnegative when the
/// lower-bound mechanism is consistent on this deformation. sigma_hat_L is
/// the best available upper bound on the scalar minimum at this L.
double lower_bound_certificate(const DeformationField& d, double sigma_hat_L);

/// Sine-coefficient analysis of the deflection component, for feeding a
/// sampled deformation into penalty/repair. Coefficients are returned in the
/// solver convention (constraint sum equals twice the slice coordinate).
TwoSidedField analyze_deflection(const DeformationField& d);

inline constexpr double kRelaxedEnergyMinimum = -5.0 / 3.0;

}  // namespace wrinkle
