#pragma once

#include "wrinkle/field.hpp"

namespace wrinkle {

/// Smooth C2 cutoff: 0 on (-inf, delta/2], 1 on [delta, inf), quintic
/// transition in between. |phi'| <= C/delta with C from the fixed profile.
struct CutoffProfile {
  double delta = 1.0;
  double value(double x) const;
  double deriv(double x) const;
  double second_deriv(double x) const;
};

CutoffProfile cutoff(double delta);

/// In-plane displacements (w1, w2) and deflection u3 sampled on a uniform
/// tensor grid over [-1,1] x [-Lp, Lp], one y-period of a field on [-L, L].
/// The closure column y = +Lp duplicates y = -Lp.
struct DeformationField {
  double L = 1.0;   // full half-period of the domain
  double Lp = 1.0;  // stored period half-width, L / Lp integral
  ArrayXd x;        // nx+1 uniform nodes on [-1,1], nx divisible by 4
  ArrayXd y;        // ny+1 uniform nodes on [-Lp,Lp], ny even
  ArrayXXd w1, w2, u3;
  double k_max_hint = 0.0;  // largest active wavenumber, 0 if unknown

  int nx() const { return static_cast<int>(x.size()) - 1; }
  int ny() const { return static_cast<int>(y.size()) - 1; }
  double hx() const { return x[1] - x[0]; }
  double hy() const { return y[1] - y[0]; }

  /// Max closure mismatch across the three components.
  double periodicity_mismatch() const;
  /// Shape, periodicity (<= 1e-10) and Nyquist-margin checks; throws.
  void validate() const;
};

DeformationField planar_deformation(double L, int nx = 512, int ny = 512);
DeformationField zero_deformation(double L, int nx = 512, int ny = 512);

/// Terms of the rescaled energy. t1b is the exact -2 bulk constant; every
/// other term is nonnegative. total = t1a + t1b + t1c + t2 + t3 + t4 + t5.
struct EnergyBreakdown {
  double t1a = 0.0;  // stretch square (w1_x + u3_x^2/(2L^2) - 1)^2
  double t1b = -2.0;
  double t1c = 0.0;  // transverse mismatch on [-1,0]
  double t2 = 0.0;   // transverse mismatch on [0,1]
  double t3 = 0.0;   // shear term
  double t4 = 0.0;   // scalar energy term, L^-2 (u3_x^2 + u3_yy^2)
  double t5 = 0.0;   // higher order, L^-4 (2 u3_xy^2 + L^-2 u3_xx^2)
  double total() const { return t1a + t1b + t1c + t2 + t3 + t4 + t5; }
};

/// Term-by-term evaluation: second-order differences, y-derivative terms on
/// the staggered midpoint grid (this makes the assembled construction's shear
/// term vanish identically), Simpson in x, trapezoid in y per unit length.
EnergyBreakdown evaluate_EL(const DeformationField& d);

/// Build the test deformation u3 = phi_delta u, w2 = phi^2 x y - int u3_y^2/2,
/// w1 = x - L^-2 int (w2_x + u3_x u3_y) from a feasible odd coefficient field
/// on L0, periodically extended to L = n_copies * L0 and by zero to x < 0.
/// The discrete cumulative integrals match the evaluator's staggered scheme.
DeformationField assemble_upper_bound(const CoefficientField& u, int n_copies,
                                      double delta, int nx = 512, int ny = 1024);

/// Physical-variable view: h = L^-2, W1(x,Y) = w1(x,LY), W2 = w2/L, U3 = u3/L.
struct PhysicalDeformation {
  double h = 1.0;
  double L = 1.0;
  double Lp = 1.0;  // rescaled stored period: Lp/L in Y units
  ArrayXd x;
  ArrayXd Y;
  ArrayXXd W1, W2, U3;
  double k_max_hint = 0.0;
};

PhysicalDeformation unrescale(const DeformationField& d);
DeformationField rescale_deformation(const PhysicalDeformation& p);

/// Direct evaluation of the physical plate energy on (W, U3); the traction
/// term is computed as the volume integral of W1_x. Agrees with evaluate_EL
/// of the rescaled field to quadrature tolerance.
double evaluate_Eh(const PhysicalDeformation& p);

}  // namespace wrinkle
