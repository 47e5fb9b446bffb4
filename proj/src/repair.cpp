#include "wrinkle/repair.hpp"

#include "wrinkle/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wrinkle {

namespace {

constexpr double kEtaCap = 0.0010405353853163596;  // pi^-6

// even C2 bump on (-1,1), mass 1: (35/32)(1-t^2)^3
double bump(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double s = 1.0 - t * t;
  return (35.0 / 32.0) * s * s * s;
}

struct Mollifier {
  double eta;
  ArrayXd s_nodes, s_weights;  // Simpson rule on [eta, 3eta], normalized mass

  explicit Mollifier(double eta_, int n_cells = 64) : eta(eta_) {
    if (n_cells % 2) ++n_cells;
    s_nodes.resize(n_cells + 1);
    s_weights.resize(n_cells + 1);
    const double h = 2 * eta / n_cells;
    for (int i = 0; i <= n_cells; ++i) {
      s_nodes[i] = eta + h * i;
      const double simp = (i == 0 || i == n_cells) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s_weights[i] = simp * h / 3.0 * bump((s_nodes[i] - 2 * eta) / eta) / eta;
    }
    s_weights /= s_weights.sum();  // convolving a constant reproduces it
  }

  // (q * phi_eta)(x) with q given nodally on grid, linearly interpolated
  double convolve(const XGrid& grid, const ArrayXd& q, double x) const {
    double acc = 0.0;
    for (int i = 0; i < s_nodes.size(); ++i)
      acc += s_weights[i] * grid.interp(q, x - s_nodes[i]);
    return acc;
  }
};

}  // namespace

double default_eta(double L) { return std::min(1.0 / std::sqrt(L), kEtaCap / 2); }

double penalty(const TwoSidedField& v) {
  const double L = v.freq.half_period();
  const ArrayXd sum = constraint_sum(v);
  ArrayXd integrand(v.grid.size());
  for (int i = 0; i < v.grid.size(); ++i) {
    const double x = v.grid.node(i);
    const double upsilon = (x > 0.0) ? x : 0.0;
    const double m = 0.5 * sum[i] - upsilon;
    integrand[i] = m * m;
  }
  return L * L * v.grid.quad(integrand);
}

RepairResult repair(const TwoSidedField& v, double eta) {
  return repair(v, eta, XGrid::graded_unit(256));
}

RepairResult repair(const TwoSidedField& v, double eta, const XGrid& out_grid) {
  if (!(eta > 0.0 && eta < kEtaCap))
    throw std::invalid_argument("repair: eta must lie in (0, pi^-6)");
  if (v.grid.node(0) > -3 * eta || v.grid.node(v.grid.size() - 1) < 1.0 - 1e-12)
    throw std::invalid_argument("repair: input field must cover [-1,1]");

  const double L = v.freq.half_period();
  const int n = out_grid.size();
  const Mollifier moll(eta);

  // merged squared coefficients per positive mode, on the input grid
  std::vector<int> in_modes;
  std::vector<ArrayXd> in_sq;
  {
    auto slot = [&](int m) -> ArrayXd& {
      auto it = std::lower_bound(in_modes.begin(), in_modes.end(), m);
      const size_t pos = it - in_modes.begin();
      if (it == in_modes.end() || *it != m) {
        in_modes.insert(it, m);
        in_sq.insert(in_sq.begin() + pos, ArrayXd::Zero(v.grid.size()));
      }
      return in_sq[pos];
    };
    for (size_t j = 0; j < v.sin_modes.size(); ++j)
      slot(v.sin_modes[j]) += v.sin_amp.col(j).square();
    for (size_t j = 0; j < v.cos_modes.size(); ++j)
      if (v.cos_modes[j] >= 1) slot(v.cos_modes[j]) += v.cos_amp.col(j).square();
  }

  // mollify, zero k <= 1/2, ramp near the origin
  std::vector<int> c_modes;
  ArrayXXd c_amp(n, 0);
  {
    std::vector<ArrayXd> cols;
    for (size_t j = 0; j < in_modes.size(); ++j) {
      const double k = v.freq.wavenumber(in_modes[j]);
      if (k <= 0.5) continue;  // dropped; the compensation absorbs their share
      ArrayXd c(n);
      const double b_eta = std::sqrt(std::max(0.0, moll.convolve(v.grid, in_sq[j], eta)));
      for (int i = 0; i < n; ++i) {
        const double x = out_grid.node(i);
        if (x >= eta) {
          c[i] = std::sqrt(std::max(0.0, moll.convolve(v.grid, in_sq[j], x)));
        } else if (k < 1.0 / std::sqrt(eta)) {
          c[i] = x / eta * b_eta;
        } else {
          const double x0 = eta - 1.0 / (k * k);
          c[i] = (x <= x0) ? 0.0 : k * k * (x - x0) * b_eta;
        }
      }
      if (c.maxCoeff() > 0.0) {
        c_modes.push_back(in_modes[j]);
        cols.push_back(std::move(c));
      }
    }
    c_amp.resize(n, cols.size());
    for (size_t j = 0; j < cols.size(); ++j) c_amp.col(j) = cols[j];
  }
  CoefficientField c_part(v.freq, out_grid, c_modes, c_amp);

  // deficit against the relaxed constraint
  const ArrayXd r = 2.0 * out_grid.nodes() - constraint_sum(c_part);
  const double b_comp = std::pow(eta, 2.0 / 3.0);

  double deficit_max = 0.0;
  for (int i = 0; i < n; ++i)
    if (out_grid.node(i) >= b_comp) deficit_max = std::max(deficit_max, r[i]);

  // cascade compensation on [0, eta^2/3]
  CascadeBuild e_build = build_cascade(v.freq, out_grid, b_comp);

  // single-mode plateau covering the residual deficit above eta^2/3
  const double k0_lo = std::pow(eta, -1.0 / 6.0);
  const int m0 = static_cast<int>(std::ceil(k0_lo * L / M_PI));
  if (m0 > v.freq.mode_cap())
    throw std::invalid_argument("repair: plateau mode not representable, need M >= " +
                                std::to_string(m0));
  const double k0 = v.freq.wavenumber(m0);
  if (k0 > 2 * k0_lo)
    throw std::invalid_argument("repair: no admissible mode in [eta^-1/6, 2 eta^-1/6]");
  CoefficientField f_part = [&] {
    ArrayXXd amp(n, 1);
    const double plateau = std::sqrt(deficit_max) / k0;
    for (int i = 0; i < n; ++i) {
      const double x = out_grid.node(i);
      amp(i, 0) = (x >= b_comp) ? plateau : plateau * x / b_comp;
    }
    return CoefficientField(v.freq, out_grid, {m0}, std::move(amp));
  }();

  const CoefficientField d_part = combine(e_build.field, f_part);
  CoefficientField g = combine(c_part, d_part);

  RepairResult out{std::move(g), {}};
  RepairBudget& b = out.budget;
  b.eta = eta;
  b.penalty_value = penalty(v);
  b.energy_in = energy(v).total;
  b.energy_c = energy(c_part).total;
  b.energy_d = energy(d_part).total;
  b.energy_out = energy(out.field).total;
  b.delta_hat = b.energy_out - b.energy_in - b.penalty_value;
  b.deficit_max = deficit_max;
  b.deficit_fit = std::max(0.0, (deficit_max - 4 * eta) * L * std::sqrt(eta));
  b.feasibility_margin =
      (constraint_sum(out.field) - 2.0 * out_grid.nodes()).minCoeff();
  b.comp_l_eta_32 = std::pow(eta, -1.5) / L;
  b.comp_eta_23 = std::pow(eta, 2.0 / 3.0);
  b.comp_l_eta_56 = std::pow(eta, -5.0 / 6.0) / L;
  return out;
}

TwoSidedField analyze_deflection(const DeformationField& d) {
  const int nx = d.nx(), ny = d.ny();
  const double hy = d.hy();
  // analysis on the stored-period lattice, then re-indexed to the full period
  const int copies = static_cast<int>(std::lround(d.L / d.Lp));
  const int m_top = std::max(1, static_cast<int>(std::floor(d.Lp / (2 * hy))));

  TwoSidedField v;
  v.freq = FrequencyGrid(d.L, std::max(FrequencyGrid::with_default_cap(d.L).mode_cap(),
                                       m_top * copies));
  std::vector<double> xs(d.x.data(), d.x.data() + nx + 1);
  v.grid = XGrid::from_nodes(std::move(xs));
  v.cos_amp.resize(nx + 1, 0);

  Eigen::MatrixXd table(ny, m_top);
  for (int m = 1; m <= m_top; ++m) {
    const double k = M_PI * m / d.Lp;
    for (int j = 0; j < ny; ++j) table(j, m - 1) = std::sin(k * d.y[j]);
  }
  // (2/ny) sum u3 sin(k y) recovers the sine amplitude; the solver convention
  // carries a sqrt(2) between amplitude and coefficient
  Eigen::MatrixXd coef =
      d.u3.matrix().leftCols(ny) * table * (2.0 / ny / std::sqrt(2.0));

  std::vector<int> keep;
  for (int m = 1; m <= m_top; ++m)
    if (coef.col(m - 1).cwiseAbs().maxCoeff() > 1e-13) keep.push_back(m);
  v.sin_amp.resize(nx + 1, keep.size());
  v.sin_modes.clear();
  for (size_t j = 0; j < keep.size(); ++j) {
    v.sin_modes.push_back(keep[j] * copies);
    v.sin_amp.col(j) = coef.col(keep[j] - 1).array().abs();
  }
  return v;
}

double lower_bound_certificate(const DeformationField& d, double sigma_hat_L) {
  const double excess = evaluate_EL(d).total() - kRelaxedEnergyMinimum;
  const TwoSidedField v = analyze_deflection(d);
  const RepairResult rep = repair(v, default_eta(d.L));
  return d.L * d.L * excess + rep.budget.delta_hat - sigma_hat_L;
}

}  // namespace wrinkle
