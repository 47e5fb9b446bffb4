#pragma once

#include "wrinkle/field.hpp"

#include <vector>

namespace wrinkle {

/// Self-similar profile f(t) = sqrt(t)*phi(t), supported in [1/4,4], C2, with
/// the exact dyadic partition identity f(t)^2 + f(4t)^2/4 = 2t on [1/4,1].
class CascadeProfile {
public:
  double value(double t) const;
  double deriv(double t) const;
  double second_deriv(double t) const;

  /// max over a fine grid of |f^2(t) + f^2(4t)/4 - 2t| on [1/4,1]
  double partition_residual(int n_probe = 10000) const;

  friend CascadeProfile build_profile();

private:
  CascadeProfile() = default;
};

CascadeProfile build_profile();

/// Dyadic wrinkle cascade: modes k_n = 2^n * P with amplitudes
/// a_n(x) = f(4^n x) / (P 4^n). Satisfies the wasted-arclength constraint
/// exactly wherever every contributing octave is resolved by the grid.
struct CascadeBuild {
  CoefficientField field;
  int n_first = 0;             // coarsest populated octave
  int n_last = 0;              // finest populated octave
  double resolved_from = 0.0;  // constraint exact on [resolved_from, resolved_to]
  double resolved_to = 1.0;
  double support_cap = 1.0;    // field vanishes for x >= support_cap
  double truncation_residual = 0.0;  // max |constraint residual| below resolved_from
};

CascadeBuild build_cascade(const FrequencyGrid& freq, const XGrid& grid,
                           double b = 1.0);

/// Smallest power-of-two mode cap whose dyadic octaves reach the first
/// positive node of a grid with x1 as its smallest positive coordinate.
int octave_mode_cap(double L, double x1);

/// Fitted constants for the derivative-moment bounds
/// avg_y |d^(alpha+beta) u / dx^alpha dy^beta|^2 <= C x^(2-2alpha-beta).
struct CascadeBoundsReport {
  struct Entry {
    int alpha = 0;
    int beta = 0;
    double fitted_constant = 0.0;
    double at_x = 0.0;
  };
  std::vector<Entry> entries;
};

CascadeBoundsReport verify_cascade_bounds(const CascadeBuild& build);

}  // namespace wrinkle
