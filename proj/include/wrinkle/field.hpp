#pragma once

#include "wrinkle/grids.hpp"

#include <vector>

namespace wrinkle {

/// Energy of a field split into its two quadratic parts plus the per-node
/// density sum_m (a_m'^2 + a_m^2 k_m^4).
struct EnergySample {
  double total = 0.0;
  double membrane = 0.0;
  double bending = 0.0;
  ArrayXd density;
};

/// Odd-in-y field u(x,y) = sum_m a_m(x) sin(k_m y) stored as the sparse list
/// of active mode indices and an (n_nodes x n_modes) amplitude matrix.
/// Invariants: amplitudes nonnegative, first column (x = 0) identically zero.
class CoefficientField {
public:
  CoefficientField(FrequencyGrid freq, XGrid grid, std::vector<int> modes,
                   ArrayXXd amp);

  static CoefficientField zero(FrequencyGrid freq, XGrid grid);

  const FrequencyGrid& freq() const { return freq_; }
  const XGrid& grid() const { return grid_; }
  const std::vector<int>& modes() const { return modes_; }
  int n_modes() const { return static_cast<int>(modes_.size()); }
  const ArrayXXd& amp() const { return amp_; }
  ArrayXXd& amp() { return amp_; }
  /// Wavenumber of the j-th stored mode.
  double k(int j) const { return freq_.wavenumber(modes_[j]); }
  const ArrayXd& wavenumbers() const { return k_; }

  double max_amplitude() const { return n_modes() ? amp_.maxCoeff() : 0.0; }

  /// Clamp tiny negative amplitudes (magnitude below 1e-14) to zero and zero
  /// out the x=0 column; larger negatives are rejected.
  void enforce_invariants();

private:
  FrequencyGrid freq_;
  XGrid grid_;
  std::vector<int> modes_;
  ArrayXXd amp_;
  ArrayXd k_;
};

/// Fourier field with both sine (m >= 1) and cosine (m >= 0) components,
/// the general 2L-periodic-in-y case before odd symmetrization.
struct TwoSidedField {
  FrequencyGrid freq;
  XGrid grid;
  std::vector<int> sin_modes;
  ArrayXXd sin_amp;  // grid.size() x sin_modes.size()
  std::vector<int> cos_modes;  // may include 0
  ArrayXXd cos_amp;

  static TwoSidedField from_odd(const CoefficientField& f);
};

/// Physical samples of a coefficient field on a uniform periodic y-grid.
struct FieldSamples {
  ArrayXd y;      // y_j = -L + 2L*j/n, j = 0..n-1
  ArrayXXd u;     // grid.size() x n
};

EnergySample energy(const CoefficientField& f);
EnergySample energy(const TwoSidedField& f);

/// r_i = sum_m a_m(x_i)^2 k_m^2 - 2 x_i.
ArrayXd constraint_residual(const CoefficientField& f);
/// Constraint sum without the 2x offset.
ArrayXd constraint_sum(const CoefficientField& f);
ArrayXd constraint_sum(const TwoSidedField& f);

/// c_m = sqrt(a_m^2 + b_m^2) on the union of the mode sets. Energy is
/// subadditive under this combination and constraint sums add exactly.
CoefficientField combine(const CoefficientField& a, const CoefficientField& b);

/// Fold cosine modes onto sine modes, c_m = sqrt(s_m^2 + c_m^2); never
/// increases energy, preserves the constraint sum.
CoefficientField symmetrize_odd(const TwoSidedField& full);

/// Pointwise sine synthesis on y_samples equispaced points per period.
/// Pairing convention: (1/L) * trapz_y(u^2) == sum_m a_m^2.
FieldSamples synthesize(const CoefficientField& f, int y_samples);

/// v(x,y) = alpha * u(x, y/alpha) on the period 2*alpha*L; alpha must be a
/// rational >= 1 with small denominator. Mode indices are preserved,
/// membrane energy scales by alpha^2 and bending by alpha^-2.
CoefficientField rescale(const CoefficientField& f, double alpha);

/// Periodic extension to period 2NL: mode m maps to N*m, amplitudes,
/// wavenumbers, energy and constraint all unchanged.
CoefficientField extend_periodic(const CoefficientField& f, int n_copies,
                                 int new_mode_cap = -1);

/// Drop modes whose peak amplitude falls below rel_floor times the field
/// maximum (at least one mode is kept).
CoefficientField truncate_modes(const CoefficientField& f, double rel_floor);

}  // namespace wrinkle
