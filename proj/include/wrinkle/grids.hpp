#pragma once

#include <Eigen/Dense>

#include <vector>

namespace wrinkle {

using Eigen::ArrayXd;
using Eigen::ArrayXXd;

/// Admissible wavenumbers k_m = pi*m/L, m = 1..M, for fields 2L-periodic in y.
class FrequencyGrid {
public:
  FrequencyGrid() : L_(1.0), M_(2) {}
  /// half_period must be >= 1; mode_cap >= 2*floor(half_period).
  FrequencyGrid(double half_period, int mode_cap);

  /// Default cap: 2*floor(L)*2^8, enough for eight dyadic octaves above the
  /// base mode.
  static FrequencyGrid with_default_cap(double half_period);

  double half_period() const { return L_; }
  int mode_cap() const { return M_; }
  double wavenumber(int m) const;

  /// Base wavenumber P = pi*floor(L)/L of the dyadic construction.
  double base_wavenumber() const;

  bool operator==(const FrequencyGrid& o) const {
    return L_ == o.L_ && M_ == o.M_;
  }

private:
  double L_;
  int M_;
};

/// One-dimensional partition with trapezoidal quadrature weights and
/// second-order difference stencils on non-uniform spacing.
class XGrid {
public:
  XGrid() : XGrid(std::vector<double>{0.0, 0.5, 1.0}) {}
  /// Graded partition of [0,1]: x_i = (i/n)^gamma, i = 0..n.
  static XGrid graded_unit(int n_cells, double gamma = 2.0);
  /// Symmetric graded partition of [-1,1] with 0 and +-1 as exact nodes.
  static XGrid symmetric_graded(int n_half_cells, double gamma = 2.0);
  /// Uniform partition of [a,b] with n_cells cells.
  static XGrid uniform(double a, double b, int n_cells);
  /// Arbitrary strictly increasing nodes.
  static XGrid from_nodes(std::vector<double> nodes);

  int size() const { return static_cast<int>(nodes_.size()); }
  double node(int i) const { return nodes_[i]; }
  const ArrayXd& nodes() const { return node_array_; }
  const ArrayXd& weights() const { return weights_; }

  double quad(const ArrayXd& f) const { return (weights_ * f).sum(); }

  /// First derivative, centered second-order stencil, one-sided at the ends.
  ArrayXd deriv(const ArrayXd& f) const;
  /// Adjoint action g = D^T (w.*v); together with deriv this gives the exact
  /// gradient of quad(deriv(f)^2).
  ArrayXd derivT_weighted(const ArrayXd& v) const;
  /// Three-point second derivative (ends copy the adjacent stencil).
  ArrayXd second_deriv(const ArrayXd& f) const;

  /// Compact Dirichlet form sum_cells (df/h)^2 h. This is the membrane
  /// quadratic actually minimized: unlike the centered form it penalizes
  /// node-scale oscillation.
  double dirichlet(const ArrayXd& f) const;
  /// out += coef * d(dirichlet)/df.
  void add_dirichlet_grad(const ArrayXd& f, double coef, ArrayXd& out) const;
  /// Per-node share of the Dirichlet form; weighted by quad weights it sums
  /// back to dirichlet(f) exactly.
  ArrayXd dirichlet_density(const ArrayXd& f) const;
  /// Diagonal of the Dirichlet Hessian / 2, i.e. 1/h_{i-1} + 1/h_i.
  const ArrayXd& dirichlet_diag() const { return dirichlet_diag_; }

  /// Index of the first node >= x (size() if none).
  int lower_node(double x) const;
  /// Piecewise-linear interpolation (clamped outside the range).
  double interp(const ArrayXd& f, double x) const;

  bool operator==(const XGrid& o) const { return nodes_ == o.nodes_; }

private:
  explicit XGrid(std::vector<double> nodes);
  void build_stencils();

  std::vector<double> nodes_;
  ArrayXd node_array_;
  ArrayXd weights_;
  // interior first-derivative bands and one-sided end stencils
  ArrayXd d1_lo_, d1_mid_, d1_hi_;
  double end0_[3], endN_[3];
  ArrayXd dirichlet_diag_;
};

}  // namespace wrinkle
