#pragma once

#include "wrinkle/field.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wrinkle {

struct SolveOptions {
  int max_iters = 8000;
  double grad_tol = 1e-6;      // relative tangent-gradient measure
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 45;
  int restarts = 3;            // perturbation restarts, seeded
  double restart_scale = 0.05;
  std::uint64_t seed = 0xC0FFEEULL;
  double k_top = 256.0;        // fill working modes up to this wavenumber
  bool fill_modes = true;
  double seed_amplitude = 1e-3;
  double prune_floor = 1e-10;  // relative amplitude below which a mode may be dropped
  int prune_every = 50;
  double active_floor = 1e-9;  // relative activity floor for mu/gap diagnostics
  double x_lo = 1e-3;          // lower cut for |ln x| envelope checks
  double conv_x_floor = 1e-4;  // stationarity is measured on x >= this
};

/// mu_m(x) = a_m'(x) / (k_m^2 a_m(x)), estimated by the centered log-slope
/// (exact on exponentials, second order on smooth profiles), masked where the
/// amplitude is below the activity floor.
struct MuTable {
  std::vector<int> modes;
  ArrayXd wavenumbers;
  ArrayXXd value;                                // nodes x modes
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> active;
};

struct MultiplierRecovery {
  ArrayXd lambda;        // interior ratio recovery, index 0 unused (zero)
  std::vector<int> skipped_nodes;
  double mu_atom = 0.0;  // boundary atom lambda({1})
  double mu_atom_spread = 0.0;
  std::vector<std::pair<int, double>> per_mode_mu1;
};

struct ElResidual {
  struct Mode {
    int mode = 0;
    double interior_rel = 0.0;
    double boundary_rel = 0.0;
    double mass = 0.0;
  };
  std::vector<Mode> per_mode;
  double interior_aggregate = 0.0;  // mass-weighted
  double boundary_aggregate = 0.0;
};

struct SolveResult {
  CoefficientField field;
  double sigma_estimate = 0.0;
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
  double constraint_max = 0.0;
  int restarts_used = 0;
  std::string init_source = "supplied";
  MultiplierRecovery multiplier;
  MuTable mu;
  ElResidual el;
};

struct CheckReport {
  struct Item {
    std::string name;
    bool pass = true;
    double margin = 0.0;    // >= 0 means satisfied with that slack
    double observed = 0.0;  // measured quantity or fitted constant
    std::string detail;
  };
  std::vector<Item> items;
  bool all_pass() const;
  std::string to_text() const;
};

struct RegularityReport {
  struct Entry {
    std::string name;      // which derivative moment
    std::string envelope;  // growth law it is compared against
    double fitted_constant = 0.0;
    double at_x = 0.0;
  };
  std::vector<Entry> entries;
  double x_lo = 1e-3;
};

/// Column-wise scaling retraction onto sum_m a_m^2 k_m^2 = 2x. Exact and
/// idempotent; throws if an interior column carries no mass.
CoefficientField project_constraint(const CoefficientField& f);

/// Projected gradient descent with diagonal preconditioning, Armijo
/// backtracking and the scaling retraction; keeps the best of the plain
/// descent, a mode-seeded descent and seeded perturbation restarts.
SolveResult minimize(const CoefficientField& init, const SolveOptions& opts = {});

MultiplierRecovery recover_multiplier(const CoefficientField& f,
                                      double active_floor = 1e-9);

MuTable compute_mu(const CoefficientField& f, double active_floor = 1e-9);

ElResidual el_residual(const CoefficientField& f, const ArrayXd& lambda,
                       double mu_atom, double x_lo = 1e-3);

/// Structure battery on a converged state: mu bounds and ordering, multiplier
/// identity and dyadic bounds, vanishing low modes, smallest active mode, gap
/// ratio, bending average, mu decay measure.
CheckReport structural_checks(const SolveResult& result,
                              const SolveOptions& opts = {});

RegularityReport regularity_report(const CoefficientField& f, double x_lo = 1e-3);

/// Trapezoidal integral of nodal data over [a,b] with linear interpolation at
/// the cut points.
double integrate_interval(const XGrid& grid, const ArrayXd& f, double a, double b);

}  // namespace wrinkle
