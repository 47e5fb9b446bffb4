#include "wrinkle/cascade.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wrinkle {

namespace {

// quintic smoothstep and derivatives on [0,1]
double smoothstep(double u) { return u * u * u * (10 + u * (-15 + 6 * u)); }
double smoothstep_d(double u) { return 30 * u * u * (1 + u * (-2 + u)); }
double smoothstep_dd(double u) { return 60 * u * (1 + u * (-3 + 2 * u)); }

// C2 plateau bump: 0 outside [1/4,4], 1 on [1/2,2]
struct Plateau {
  static void eval(double t, double& v, double& d, double& dd) {
    if (t <= 0.25 || t >= 4.0) { v = d = dd = 0.0; return; }
    if (t < 0.5) {
      const double u = 4 * t - 1;
      v = smoothstep(u);
      d = 4 * smoothstep_d(u);
      dd = 16 * smoothstep_dd(u);
      return;
    }
    if (t <= 2.0) { v = 1.0; d = dd = 0.0; return; }
    const double u = (4 - t) / 2;
    v = smoothstep(u);
    d = -0.5 * smoothstep_d(u);
    dd = 0.25 * smoothstep_dd(u);
  }
};

// phi(t) = sqrt(2) * plateau(t) / sqrt(plateau(t)^2 + plateau(c*t)^2)
// with c = 4 on [1/4,1] and c = 1/4 on (1,4]
void eval_phi(double t, double& phi, double& dphi, double& ddphi) {
  if (t < 0.25 || t > 4.0) { phi = dphi = ddphi = 0.0; return; }
  const double c = (t <= 1.0) ? 4.0 : 0.25;
  double u, du, ddu, v, dv, ddv;
  Plateau::eval(t, u, du, ddu);
  Plateau::eval(c * t, v, dv, ddv);
  dv *= c;
  ddv *= c * c;
  const double g = u * u + v * v;
  const double dg = 2 * (u * du + v * dv);
  const double ddg = 2 * (du * du + u * ddu + dv * dv + v * ddv);
  const double r = 1.0 / std::sqrt(g);
  const double s2 = std::sqrt(2.0);
  phi = s2 * u * r;
  dphi = s2 * (du * r - 0.5 * u * dg * r * r * r);
  ddphi = s2 * (ddu * r - du * dg * r * r * r - 0.5 * u * ddg * r * r * r +
                0.75 * u * dg * dg * r * r * r * r * r);
}

}  // namespace

double CascadeProfile::value(double t) const {
  if (t < 0.25 || t > 4.0) return 0.0;
  double p, dp, ddp;
  eval_phi(t, p, dp, ddp);
  return std::sqrt(t) * p;
}

double CascadeProfile::deriv(double t) const {
  if (t < 0.25 || t > 4.0) return 0.0;
  double p, dp, ddp;
  eval_phi(t, p, dp, ddp);
  const double st = std::sqrt(t);
  return p / (2 * st) + st * dp;
}

double CascadeProfile::second_deriv(double t) const {
  if (t < 0.25 || t > 4.0) return 0.0;
  double p, dp, ddp;
  eval_phi(t, p, dp, ddp);
  const double st = std::sqrt(t);
  return -p / (4 * t * st) + dp / st + st * ddp;
}

double CascadeProfile::partition_residual(int n_probe) const {
  double worst = 0.0;
  for (int i = 0; i <= n_probe; ++i) {
    const double t = 0.25 + 0.75 * static_cast<double>(i) / n_probe;
    const double v = value(t);
    const double v4 = value(4 * t);
    worst = std::max(worst, std::abs(v * v + 0.25 * v4 * v4 - 2 * t));
  }
  return worst;
}

CascadeProfile build_profile() { return CascadeProfile(); }

CascadeBuild build_cascade(const FrequencyGrid& freq, const XGrid& grid, double b) {
  if (!(b > 0.0 && b <= 1.0))
    throw std::invalid_argument("build_cascade: b must lie in (0,1]");
  if (std::abs(grid.node(0)) != 0.0 || grid.node(grid.size() - 1) < 1.0 - 1e-15)
    throw std::invalid_argument("build_cascade: grid must span [0,1] from 0");

  const CascadeProfile f = build_profile();
  const double P = freq.base_wavenumber();
  const int m_base = static_cast<int>(std::floor(freq.half_period()));

  // coarsest octave: largest n >= 0 with 4^n * b <= 1, so that the support
  // cap 4^(1-n0) is as tight as the quantization of b allows
  const int n0 = std::max(0, static_cast<int>(std::floor(
                                 -std::log(b) / std::log(4.0) + 1e-12)));

  const double x1 = grid.node(1);
  // finest octave the grid can resolve: smallest n with 4^-n < x1
  int n_res = 0;
  while (std::pow(4.0, -n_res) >= x1) ++n_res;
  // finest octave the mode cap admits
  int n_cap = 0;
  while ((static_cast<long>(m_base) << (n_cap + 1)) <= freq.mode_cap()) ++n_cap;

  if (n_cap < n0) {
    const long needed = static_cast<long>(m_base) << n_res;
    throw std::invalid_argument(
        "build_cascade: mode cap too small for b = " + std::to_string(b) +
        ", need M >= " + std::to_string(needed));
  }
  const int n_last = std::min(n_res, n_cap);

  std::vector<int> modes;
  ArrayXXd amp = ArrayXXd::Zero(grid.size(), n_last - n0 + 1);
  for (int n = n0; n <= n_last; ++n) {
    modes.push_back(m_base << n);
    const double scale = 1.0 / (P * std::pow(4.0, n));
    for (int i = 0; i < grid.size(); ++i)
      amp(i, n - n0) = scale * f.value(std::pow(4.0, n) * grid.node(i));
  }

  CascadeBuild out{CoefficientField(freq, grid, std::move(modes), std::move(amp)),
                   n0, n_last};
  out.resolved_from = std::pow(4.0, -n_last);
  out.resolved_to = std::pow(4.0, -n0);
  out.support_cap = std::min(1.0, std::pow(4.0, 1 - n0));
  const ArrayXd r = constraint_residual(out.field);
  for (int i = 1; i < grid.size(); ++i)
    if (grid.node(i) < out.resolved_from)
      out.truncation_residual = std::max(out.truncation_residual, std::abs(r[i]));
  return out;
}

int octave_mode_cap(double L, double x1) {
  int n_res = 0;
  while (std::pow(4.0, -n_res) >= x1) ++n_res;
  const int m_base = static_cast<int>(std::floor(L));
  return m_base << n_res;
}

CascadeBoundsReport verify_cascade_bounds(const CascadeBuild& build) {
  static const int pairs[6][2] = {{0, 0}, {1, 0}, {0, 2}, {1, 1}, {2, 0}, {1, 2}};
  const CascadeProfile f = build_profile();
  const auto& field = build.field;
  const auto& grid = field.grid();
  const double P = field.freq().base_wavenumber();

  CascadeBoundsReport report;
  for (const auto& p : pairs) {
    const int alpha = p[0], beta = p[1];
    CascadeBoundsReport::Entry e{alpha, beta, 0.0, 0.0};
    for (int i = 1; i < grid.size(); ++i) {
      const double x = grid.node(i);
      double moment = 0.0;
      for (int j = 0; j < field.n_modes(); ++j) {
        if (field.amp().col(j).maxCoeff() <= 0.0) continue;
        const int n = build.n_first + j;
        const double four_n = std::pow(4.0, n);
        const double t = four_n * x;
        double da;
        switch (alpha) {
          case 0: da = f.value(t); break;
          case 1: da = four_n * f.deriv(t); break;
          default: da = four_n * four_n * f.second_deriv(t); break;
        }
        da /= P * four_n;
        moment += da * da * std::pow(field.k(j), 2 * beta);
      }
      const double envelope = std::pow(x, 2.0 - 2 * alpha - beta);
      const double ratio = moment / envelope;
      if (ratio > e.fitted_constant) {
        e.fitted_constant = ratio;
        e.at_x = x;
      }
    }
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace wrinkle
