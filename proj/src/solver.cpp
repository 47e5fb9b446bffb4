#include "wrinkle/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wrinkle {

namespace {

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct Work {
  FrequencyGrid freq;
  XGrid grid;
  std::vector<int> modes;
  ArrayXd k2, k4;      // per mode
  ArrayXXd amp;        // nodes x modes

  Work(const FrequencyGrid& f, const XGrid& g, std::vector<int> m)
      : freq(f), grid(g), modes(std::move(m)) {
    k2.resize(modes.size());
    k4.resize(modes.size());
    for (size_t j = 0; j < modes.size(); ++j) {
      const double k = freq.wavenumber(modes[j]);
      k2[j] = k * k;
      k4[j] = k2[j] * k2[j];
    }
    amp = ArrayXXd::Zero(grid.size(), modes.size());
  }

  CoefficientField to_field() const {
    return CoefficientField(freq, grid, modes, amp.max(0.0));
  }
};

double work_energy(const Work& w, const ArrayXXd& amp) {
  double s = 0.0;
  for (int j = 0; j < amp.cols(); ++j)
    s += w.grid.dirichlet(amp.col(j)) + w.k4[j] * w.grid.quad(amp.col(j).square());
  return s;
}

ArrayXXd work_grad(const Work& w) {
  ArrayXXd g(w.amp.rows(), w.amp.cols());
  const ArrayXd& wt = w.grid.weights();
  for (int j = 0; j < w.amp.cols(); ++j) {
    ArrayXd col = 2.0 * w.k4[j] * wt * w.amp.col(j);
    w.grid.add_dirichlet_grad(w.amp.col(j), 1.0, col);
    g.col(j) = col;
  }
  g.row(0).setZero();
  return g;
}

// scale each x-column (matrix row) back onto sum a^2 k^2 = 2x
bool retract_rows(const Work& w, ArrayXXd& amp) {
  const int n = static_cast<int>(amp.rows());
  Eigen::ArrayXd s = (amp.square().matrix() * w.k2.matrix()).array();
  for (int i = 1; i < n; ++i) {
    if (!(s[i] > 0.0)) return false;
    amp.row(i) *= std::sqrt(2.0 * w.grid.node(i) / s[i]);
  }
  amp.row(0).setZero();
  return true;
}

struct Tangent {
  ArrayXXd g_tan;
  double rel = 0.0;  // stationarity residual relative to the equation scale
};

Tangent tangent_project(const Work& w, const ArrayXXd& g, double x_floor) {
  // normal of the constraint slice at node i is (a_m k_m^2)_m
  ArrayXXd nu = w.amp.rowwise() * w.k2.transpose();  // a * k^2
  ArrayXd num = (g * nu).rowwise().sum();
  ArrayXd den = nu.square().rowwise().sum();
  ArrayXd coef = (den > 0.0).select(num / den.max(1e-300), ArrayXd::Zero(den.size()));
  coef[0] = 0.0;
  Tangent t;
  t.g_tan = g - (nu.colwise() * coef);
  // g_tan / (2w) is the pointwise multiplier-form residual; compare it in a
  // mass-weighted norm against the sizes of the two balanced terms, over the
  // window the grid actually resolves
  ArrayXd inv4w = 0.25 / w.grid.weights();
  for (int i = 0; i < w.grid.size(); ++i)
    if (w.grid.node(i) < x_floor) inv4w[i] = 0.0;
  double rn = 0.0, rd = 0.0;
  for (int j = 0; j < g.cols(); ++j) {
    rn += (t.g_tan.col(j).square() * inv4w).sum();
    rd += ((g.col(j).square() + (nu.col(j) * coef).square()) * inv4w).sum();
  }
  t.rel = (rd > 0.0) ? std::sqrt(rn / rd) : 0.0;
  return t;
}

// Thomas factorization of 2*(membrane tridiagonal + k^4 W) per mode, with
// the x = 0 row pinned to identity; used as the descent preconditioner.
struct ModeFactor {
  ArrayXd diag, lower, upper;  // factored in place

  void build(const XGrid& grid, double k4) {
    const int n = grid.size();
    diag.resize(n);
    lower.resize(n);
    upper.resize(n);
    ArrayXd d(n), lo(n), up(n);
    d.setZero();
    lo.setZero();
    up.setZero();
    for (int i = 0; i + 1 < n; ++i) {
      const double inv_h = 1.0 / (grid.node(i + 1) - grid.node(i));
      d[i] += inv_h;
      d[i + 1] += inv_h;
      lo[i + 1] = -inv_h;
      up[i] = -inv_h;
    }
    d += k4 * grid.weights();
    d *= 2.0;
    lo *= 2.0;
    up *= 2.0;
    // pin the frozen x = 0 variable
    d[0] = 1.0;
    up[0] = 0.0;
    lo[1] = 0.0;
    // forward elimination factors
    diag[0] = d[0];
    upper[0] = up[0];
    lower[0] = 0.0;
    for (int i = 1; i < n; ++i) {
      const double m = lo[i] / diag[i - 1];
      lower[i] = m;
      diag[i] = d[i] - m * upper[i - 1];
      upper[i] = up[i];
    }
  }

  void solve(const ArrayXd& rhs, ArrayXd& out) const {
    const int n = static_cast<int>(diag.size());
    out[0] = rhs[0];
    for (int i = 1; i < n; ++i) out[i] = rhs[i] - lower[i] * out[i - 1];
    out[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i)
      out[i] = (out[i] - upper[i] * out[i + 1]) / diag[i];
  }
};

struct DescendStats {
  double sigma = 0.0;
  int iterations = 0;
  bool converged = false;  // energy-normalized tangent gradient below tol
  double rel = 0.0;        // stationarity residual, reported
};

void prune_at_floor(Work& w, double& S, double floor) {
  if (w.amp.cols() <= 1) return;
  const double cut = floor * w.amp.maxCoeff();
  std::vector<int> keep;
  for (int j = 0; j < w.amp.cols(); ++j)
    if (w.amp.col(j).maxCoeff() >= cut) keep.push_back(j);
  if (keep.size() == static_cast<size_t>(w.amp.cols()) || keep.empty()) return;

  Work trial(w.freq, w.grid, {});
  trial.modes.reserve(keep.size());
  trial.k2.resize(keep.size());
  trial.k4.resize(keep.size());
  trial.amp.resize(w.amp.rows(), keep.size());
  for (size_t c = 0; c < keep.size(); ++c) {
    trial.modes.push_back(w.modes[keep[c]]);
    trial.k2[c] = w.k2[keep[c]];
    trial.k4[c] = w.k4[keep[c]];
    trial.amp.col(c) = w.amp.col(keep[c]);
  }
  if (!retract_rows(trial, trial.amp)) return;
  const double St = work_energy(trial, trial.amp);
  if (St <= S * (1.0 + 1e-14) + 1e-300) {
    w = std::move(trial);
    S = std::min(S, St);
  }
}

// tiered: drop as much dormant weight as the energy check allows
void prune_modes(Work& w, double& S, const SolveOptions& o) {
  for (double floor : {1e-4, 1e-6, 1e-8}) {
    if (floor < o.prune_floor) break;
    const auto before = w.amp.cols();
    prune_at_floor(w, S, floor);
    if (w.amp.cols() != before) return;
  }
  prune_at_floor(w, S, o.prune_floor);
}

DescendStats descend(Work& w, const SolveOptions& o, int budget) {
  DescendStats st;
  w.amp = w.amp.max(0.0);
  w.amp.row(0).setZero();
  if (!retract_rows(w, w.amp))
    throw std::runtime_error(
        "minimize: interior slice lost all amplitude; reinitialize (for "
        "instance from the cascade)");
  double S = work_energy(w, w.amp);

  // per-mode curvature of the discrete functional
  auto precond = [&]() {
    std::vector<ModeFactor> fac(w.amp.cols());
    for (int j = 0; j < w.amp.cols(); ++j) fac[j].build(w.grid, w.k4[j]);
    return fac;
  };
  std::vector<ModeFactor> factors = precond();

  double alpha = 1.0;
  double window_start_S = S;
  double window_start_rel = 1e300;
  int it = 0;
  for (; it < budget; ++it) {
    if (it % 512 == 511) {
      if (std::getenv("WRINKLE_SOLVER_TRACE"))
        std::fprintf(stderr, "trace it=%d S=%.12f rel=%.3e cols=%ld\n", it, S,
                     st.rel, static_cast<long>(w.amp.cols()));
      // a stall is roundoff-level energy progress with no movement in the
      // stationarity measure either
      if (window_start_S - S <= 1e-12 * std::max(std::abs(S), 1.0) &&
          st.rel > 0.98 * window_start_rel)
        break;
      window_start_S = S;
      window_start_rel = st.rel;
    }
    const ArrayXXd g = work_grad(w);
    Tangent t = tangent_project(w, g, o.conv_x_floor);
    const ArrayXXd& gt = t.g_tan;
    ArrayXXd d(gt.rows(), gt.cols());
    for (int j = 0; j < gt.cols(); ++j) {
      ArrayXd col(gt.rows());
      factors[j].solve(gt.col(j), col);
      d.col(j) = col;
    }
    const double gn2 = (gt * d).sum();
    st.rel = t.rel;
    // the tolerance gates the energy-normalized tangent gradient; iteration
    // continues past it while the pointwise stationarity still improves
    st.converged = st.converged || gn2 / std::max(S, 1e-300) <= o.grad_tol;
    if (st.converged && st.rel <= o.grad_tol) break;

    bool accepted = false;
    double a_try = alpha;
    ArrayXXd cand;
    double St = S;
    for (int bt = 0; bt < o.max_backtracks; ++bt) {
      cand = (w.amp - a_try * d).max(0.0);
      cand.row(0).setZero();
      if (retract_rows(w, cand)) {
        // sufficient decrease against the post-projection displacement; the
        // clamp and the retraction may absorb most of a large trial step
        const double model = (g * (w.amp - cand)).sum();
        St = work_energy(w, cand);
        if (model > 0.0 && St <= S - o.armijo_c * model) {
          accepted = true;
          break;
        }
      }
      a_try *= o.backtrack;
    }
    if (!accepted) {
      if (std::getenv("WRINKLE_SOLVER_TRACE"))
        std::fprintf(stderr, "trace armijo-stall it=%d S=%.12f rel=%.3e\n", it,
                     S, st.rel);
      break;  // progress below arithmetic resolution
    }
    w.amp.swap(cand);
    S = St;
    alpha = std::min(a_try * 2.0, 4.0);
    if ((it + 1) % o.prune_every == 0) {
      const auto cols = w.amp.cols();
      prune_modes(w, S, o);
      if (w.amp.cols() != cols) factors = precond();
    }
  }
  st.iterations = it;
  st.sigma = S;
  return st;
}

Work make_work(const CoefficientField& init, const SolveOptions& o, bool fill,
               double seed_amp, std::mt19937_64* rng) {
  std::vector<int> modes = init.modes();
  if (fill) {
    const double L = init.freq().half_period();
    const int m_top = std::min<int>(init.freq().mode_cap(),
                                    static_cast<int>(o.k_top * L / M_PI));
    for (int m = 1; m <= m_top; ++m) modes.push_back(m);
    std::sort(modes.begin(), modes.end());
    modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  }
  Work w(init.freq(), init.grid(), modes);
  for (int j = 0; j < init.n_modes(); ++j) {
    const auto it = std::lower_bound(w.modes.begin(), w.modes.end(), init.modes()[j]);
    w.amp.col(it - w.modes.begin()) = init.amp().col(j);
  }
  if (seed_amp > 0.0) {
    const double root_j = std::sqrt(static_cast<double>(w.modes.size()));
    std::uniform_real_distribution<double> uni(0.5, 1.0);
    for (int j = 0; j < w.amp.cols(); ++j) {
      const double k = std::sqrt(w.k2[j]);
      for (int i = 1; i < w.amp.rows(); ++i) {
        const double draw = rng ? uni(*rng) : 1.0;
        w.amp(i, j) += seed_amp * draw * std::sqrt(2.0 * w.grid.node(i)) / (k * root_j);
      }
    }
  }
  return w;
}

}  // namespace

CoefficientField project_constraint(const CoefficientField& f) {
  ArrayXXd amp = f.amp();
  const int n = f.grid().size();
  ArrayXd s = ArrayXd::Zero(n);
  for (int j = 0; j < f.n_modes(); ++j)
    s += amp.col(j).square() * (f.k(j) * f.k(j));
  for (int i = 1; i < n; ++i) {
    if (!(s[i] > 0.0))
      throw std::runtime_error(
          "project_constraint: slice x = " + std::to_string(f.grid().node(i)) +
          " carries no amplitude; reinitialize (the cascade initializer "
          "precludes this)");
    amp.row(i) *= std::sqrt(2.0 * f.grid().node(i) / s[i]);
  }
  if (n > 0) amp.row(0).setZero();
  return CoefficientField(f.freq(), f.grid(), f.modes(), std::move(amp));
}

SolveResult minimize(const CoefficientField& init, const SolveOptions& opts) {
  if (init.n_modes() == 0)
    throw std::invalid_argument("minimize: init has no modes");

  std::mt19937_64 rng(opts.seed);
  int total_iters = 0;

  // candidate 0: plain descent from the projected init (guarantees the
  // monotone-descent contract against energy(init))
  std::optional<Work> best;
  DescendStats best_stats;
  std::string source = "supplied";
  try {
    Work plain = make_work(init, opts, false, 0.0, nullptr);
    best_stats = descend(plain, opts, opts.max_iters);
    total_iters += best_stats.iterations;
    best = std::move(plain);
  } catch (const std::runtime_error&) {
    if (!opts.fill_modes) throw;  // init cannot cover the grid, no fallback
  }

  // candidate 1: mode-filled seeded descent (support discovery)
  if (opts.fill_modes) {
    Work seeded = make_work(init, opts, true, opts.seed_amplitude, &rng);
    DescendStats st = descend(seeded, opts, opts.max_iters);
    total_iters += st.iterations;
    if (!best || st.sigma < best_stats.sigma) {
      best = std::move(seeded);
      best_stats = st;
      source = "seeded";
    }
  }
  if (!best) throw std::runtime_error("minimize: no descent candidate succeeded");

  int restarts_used = 0;
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int r = 0; r < opts.restarts; ++r) {
    Work cand = make_work(best->to_field(), opts, opts.fill_modes,
                          opts.seed_amplitude * 0.1, &rng);
    const double root_j = std::sqrt(static_cast<double>(cand.modes.size()));
    for (int j = 0; j < cand.amp.cols(); ++j) {
      const double k = std::sqrt(cand.k2[j]);
      for (int i = 1; i < cand.amp.rows(); ++i) {
        const double mult = 1.0 + opts.restart_scale * sym(rng);
        const double add = opts.restart_scale * uni(rng) *
                           std::sqrt(2.0 * cand.grid.node(i)) / (k * root_j);
        cand.amp(i, j) = std::abs(cand.amp(i, j) * mult + add);
      }
    }
    DescendStats st = descend(cand, opts, opts.max_iters);
    total_iters += st.iterations;
    ++restarts_used;
    if (st.sigma < best_stats.sigma) {
      best = std::move(cand);
      best_stats = st;
      source = "restart";
    }
  }

  CoefficientField field = project_constraint(best->to_field());
  SolveResult out{field};
  out.sigma_estimate = energy(field).total;
  out.iterations = total_iters;
  out.converged = best_stats.converged;
  out.grad_norm = best_stats.rel;
  out.constraint_max = constraint_residual(field).abs().maxCoeff();
  out.restarts_used = restarts_used;
  out.init_source = source;
  out.multiplier = recover_multiplier(field, opts.active_floor);
  out.mu = compute_mu(field, opts.active_floor);
  out.el = el_residual(field, out.multiplier.lambda, out.multiplier.mu_atom,
                       opts.x_lo);
  return out;
}

MultiplierRecovery recover_multiplier(const CoefficientField& f,
                                      double active_floor) {
  const int n = f.grid().size();
  MultiplierRecovery out;
  out.lambda = ArrayXd::Zero(n);

  ArrayXd num = ArrayXd::Zero(n);
  ArrayXd den = ArrayXd::Zero(n);
  for (int j = 0; j < f.n_modes(); ++j) {
    const double k2 = f.k(j) * f.k(j);
    const ArrayXd a = f.amp().col(j);
    const ArrayXd da = f.grid().deriv(a);
    num += da.square() * k2 + a.square() * (k2 * k2 * k2);
    den += a.square() * (k2 * k2);
  }
  const double den_floor = 1e-300;
  for (int i = 1; i < n; ++i) {
    if (den[i] > den_floor)
      out.lambda[i] = num[i] / den[i];
    else
      out.skipped_nodes.push_back(i);
  }

  // atom at x = 1 from the natural boundary condition a'(1) = mu a(1) k^2
  const double max_amp = f.max_amplitude();
  double wsum = 0.0, msum = 0.0;
  for (int j = 0; j < f.n_modes(); ++j) {
    const ArrayXd a = f.amp().col(j);
    if (!(a[n - 1] > active_floor * max_amp)) continue;
    const double k2 = f.k(j) * f.k(j);
    const double da1 = f.grid().deriv(a)[n - 1];
    const double mu_j = da1 / (k2 * a[n - 1]);
    const double wgt = a[n - 1] * a[n - 1] * k2 * k2;
    out.per_mode_mu1.emplace_back(f.modes()[j], mu_j);
    wsum += wgt;
    msum += wgt * mu_j;
  }
  out.mu_atom = (wsum > 0.0) ? std::max(0.0, msum / wsum) : 0.0;
  for (const auto& pm : out.per_mode_mu1)
    out.mu_atom_spread = std::max(out.mu_atom_spread, std::abs(pm.second - out.mu_atom));
  return out;
}

MuTable compute_mu(const CoefficientField& f, double active_floor) {
  const int n = f.grid().size();
  MuTable out;
  out.modes = f.modes();
  out.wavenumbers = f.wavenumbers();
  out.value = ArrayXXd::Zero(n, f.n_modes());
  out.active = BoolArray::Constant(n, f.n_modes(), false);
  const double cut = active_floor * f.max_amplitude();

  for (int j = 0; j < f.n_modes(); ++j) {
    const double k2 = f.k(j) * f.k(j);
    const ArrayXd a = f.amp().col(j);
    for (int i = 1; i < n; ++i) {
      const int ip = std::min(i + 1, n - 1);
      const int im = i - 1;
      if (!(a[i] > cut) || !(a[ip] > 0.0) || !(a[im] > 0.0)) continue;
      // centered log-slope: exact on exponential decay, second order else
      out.value(i, j) = std::log(a[ip] / a[im]) /
                        (k2 * (f.grid().node(ip) - f.grid().node(im)));
      out.active(i, j) = true;
    }
  }
  return out;
}

ElResidual el_residual(const CoefficientField& f, const ArrayXd& lambda,
                       double mu_atom, double x_lo) {
  ElResidual out;
  const int n = f.grid().size();
  if (f.n_modes() == 0) return out;

  double total_mass = 0.0;
  std::vector<double> masses(f.n_modes());
  for (int j = 0; j < f.n_modes(); ++j) {
    const ArrayXd a = f.amp().col(j);
    const ArrayXd da = f.grid().deriv(a);
    masses[j] = f.grid().quad(da.square()) +
                std::pow(f.k(j), 4) * f.grid().quad(a.square());
    total_mass += masses[j];
  }

  double agg_num = 0.0, agg_bnd = 0.0, agg_mass = 0.0;
  for (int j = 0; j < f.n_modes(); ++j) {
    if (masses[j] <= 1e-12 * total_mass) continue;  // residual 0 by convention
    const double k2 = f.k(j) * f.k(j);
    const double k4 = k2 * k2;
    const ArrayXd a = f.amp().col(j);
    const ArrayXd dda = f.grid().second_deriv(a);

    double rnum = 0.0, rden = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
      const double x = f.grid().node(i);
      if (x < x_lo) continue;
      const double w = f.grid().weights()[i];
      // a'' = a k^4 - lambda a k^2 (the variational form integrated by parts)
      const double r = dda[i] - k4 * a[i] + lambda[i] * k2 * a[i];
      const double scale = std::abs(dda[i]) + k4 * a[i] + std::abs(lambda[i]) * k2 * a[i];
      rnum += w * r * r;
      rden += w * scale * scale;
    }
    ElResidual::Mode m;
    m.mode = f.modes()[j];
    m.mass = masses[j];
    m.interior_rel = (rden > 0.0) ? std::sqrt(rnum / rden) : 0.0;

    // boundary condition only meaningful for modes still alive at x = 1
    if (a[n - 1] > 1e-9 * f.max_amplitude()) {
      const double da1 = f.grid().deriv(a)[n - 1];
      const double bscale = std::abs(da1) + mu_atom * k2 * a[n - 1];
      if (bscale > 0.0)
        m.boundary_rel = std::abs(da1 - mu_atom * k2 * a[n - 1]) / bscale;
    }

    agg_num += m.mass * m.interior_rel;
    agg_bnd += m.mass * m.boundary_rel;
    agg_mass += m.mass;
    out.per_mode.push_back(m);
  }
  if (agg_mass > 0.0) {
    out.interior_aggregate = agg_num / agg_mass;
    out.boundary_aggregate = agg_bnd / agg_mass;
  }
  return out;
}

double integrate_interval(const XGrid& grid, const ArrayXd& f, double a, double b) {
  double acc = 0.0;
  for (int i = 0; i + 1 < grid.size(); ++i) {
    const double lo = std::max(a, grid.node(i));
    const double hi = std::min(b, grid.node(i + 1));
    if (hi <= lo) continue;
    const double flo = grid.interp(f, lo);
    const double fhi = grid.interp(f, hi);
    acc += 0.5 * (flo + fhi) * (hi - lo);
  }
  return acc;
}

bool CheckReport::all_pass() const {
  for (const auto& it : items)
    if (!it.pass) return false;
  return true;
}

std::string CheckReport::to_text() const {
  std::ostringstream os;
  for (const auto& it : items) {
    os << (it.pass ? "[ok]   " : "[FAIL] ") << it.name
       << "  margin=" << it.margin << "  observed=" << it.observed;
    if (!it.detail.empty()) os << "  (" << it.detail << ")";
    os << "\n";
  }
  return os.str();
}

CheckReport structural_checks(const SolveResult& result, const SolveOptions& opts) {
  CheckReport rep;
  const CoefficientField& f = result.field;
  const XGrid& grid = f.grid();
  const int n = grid.size();
  const double sigma = result.sigma_estimate;
  const ArrayXd& lambda = result.multiplier.lambda;
  const double max_amp = f.max_amplitude();
  const double eps = 1e-6;

  // global mode activity
  std::vector<int> active_idx;
  for (int j = 0; j < f.n_modes(); ++j)
    if (f.amp().col(j).maxCoeff() > opts.active_floor * max_amp)
      active_idx.push_back(j);

  {  // integral identity int 2x dlambda = S, atom included
    ArrayXd integrand = 2.0 * grid.nodes() * lambda;
    integrand[0] = 0.0;
    const double total = grid.quad(integrand) + 2.0 * result.multiplier.mu_atom;
    const double rel = std::abs(total - sigma) / std::max(sigma, 1e-300);
    rep.items.push_back({"multiplier_identity", rel <= 0.02, 0.02 - rel, rel,
                         "(int 2x lambda + 2 mu) vs sigma, relative"});
  }
  {  // nonnegativity
    const double lmin = lambda.minCoeff();
    rep.items.push_back({"lambda_nonnegative", lmin >= 0.0, lmin, lmin, ""});
  }
  {  // dyadic lower bound lambda([x0,2x0]) >= ln 2
    double worst = 1e300;
    for (double x0 : {1.0 / 16, 1.0 / 8, 1.0 / 4}) {
      const double got = integrate_interval(grid, lambda, x0, 2 * x0);
      worst = std::min(worst, got - (std::log(2.0) - 0.05));
    }
    rep.items.push_back({"lambda_dyadic_lower", worst >= 0.0, worst, worst,
                         "min slack over x0 in {1/16,1/8,1/4}"});
  }
  {  // dyadic upper constant C3 (observed, no external target)
    double c3 = 0.0;
    for (double x0 = 0.5; x0 >= opts.x_lo; x0 /= 2)
      c3 = std::max(c3, integrate_interval(grid, lambda, x0, std::min(1.0, 2 * x0)));
    rep.items.push_back({"lambda_dyadic_upper", true, 0.0, c3, "fitted C3"});
  }
  {  // pointwise envelope lambda(x) <~ x^-1 (|ln x|^3 + 1)
    double c = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
      const double x = grid.node(i);
      if (x < opts.x_lo) continue;
      const double env = (std::pow(std::abs(std::log(x)), 3) + 1.0) / x;
      c = std::max(c, lambda[i] / env);
    }
    rep.items.push_back({"lambda_pointwise_envelope", true, 0.0, c, "fitted C"});
  }
  {  // mu bounds on [1/k^2, 1]
    double margin = 1e300;
    for (int j : active_idx) {
      const double k2 = f.k(j) * f.k(j);
      for (int i = 1; i < n; ++i) {
        if (!result.mu.active(i, j)) continue;
        if (grid.node(i - 1) < 1.0 / k2) continue;  // log-slope stencil containment
        const double mu = result.mu.value(i, j);
        margin = std::min(margin, std::min(mu + 1 + eps, 1 + eps - mu));
      }
    }
    if (margin == 1e300) margin = 0.0;
    rep.items.push_back({"mu_bounds", margin >= 0.0, margin, margin,
                         "min slack of -1-eps < mu_k < 1+eps"});
  }
  {  // cross ordering mu_k <= mu_m + eps for k > m
    double margin = 1e300;
    for (size_t a = 0; a < active_idx.size(); ++a) {
      for (size_t b = a + 1; b < active_idx.size(); ++b) {
        const int jm = active_idx[a], jk = active_idx[b];  // k(jk) > k(jm)
        const double k2 = f.k(jk) * f.k(jk);
        for (int i = 1; i < n; ++i) {
          const double x = grid.node(i);
          if (x >= 1.0 || grid.node(i - 1) < std::max(1.0 / k2, opts.x_lo)) continue;
          if (!result.mu.active(i, jk) || !result.mu.active(i, jm)) continue;
          margin = std::min(margin, result.mu.value(i, jm) + eps -
                                        result.mu.value(i, jk));
        }
      }
    }
    if (margin == 1e300) margin = 0.0;
    rep.items.push_back({"mu_ordering", margin >= 0.0, margin, margin,
                         "min slack of mu_k <= mu_m + eps, k > m"});
  }
  {  // modes with k <= 2^(-1/4) must vanish
    const double k_triv = std::pow(0.5, 0.25);
    double sup = 0.0;
    for (int j = 0; j < f.n_modes(); ++j)
      if (f.k(j) <= k_triv) sup = std::max(sup, f.amp().col(j).maxCoeff());
    const double bound = 1e-8 * max_amp;
    rep.items.push_back({"low_mode_vanishing", sup <= bound, bound - sup, sup,
                         "sup amplitude of modes k <= 2^-1/4"});
  }
  {  // smallest active wavenumber <= sqrt(sigma) + one grid spacing
    double kmin = 1e300;
    for (int j : active_idx) kmin = std::min(kmin, f.k(j));
    const double slack = M_PI / f.freq().half_period();
    const double bound = std::sqrt(std::max(sigma, 0.0)) + slack;
    rep.items.push_back({"smallest_active_mode", kmin <= bound, bound - kmin,
                         kmin, "vs sqrt(sigma) + pi/L"});
  }
  {  // consecutive active-wavenumber gap ratio (observed)
    double ratio = 1.0;
    for (size_t a = 0; a + 1 < active_idx.size(); ++a)
      ratio = std::max(ratio, f.k(active_idx[a + 1]) / f.k(active_idx[a]));
    rep.items.push_back({"gap_ratio", true, 0.0, ratio,
                         "max ratio of consecutive active wavenumbers"});
  }
  {  // bending average int_0^x0 B <= C2 x0 on dyadic x0
    ArrayXd bending = ArrayXd::Zero(n);
    for (int j = 0; j < f.n_modes(); ++j)
      bending += f.amp().col(j).square() * std::pow(f.k(j), 4);
    double c2 = 0.0;
    for (double x0 = 1.0; x0 >= opts.x_lo; x0 /= 2)
      c2 = std::max(c2, integrate_interval(grid, bending, 0.0, x0) / x0);
    rep.items.push_back({"bending_average", true, 0.0, c2, "fitted C2"});
  }
  {  // measure of {mu_k >= -1+Delta} against (ln k + 1)/(Delta k^2)
    double c4 = 0.0;
    for (double delta : {0.5, 0.25, 0.125}) {
      for (int j : active_idx) {
        const double k = f.k(j);
        if (k <= 1.0) continue;
        double measure = 0.0;
        for (int i = 1; i < n; ++i)
          if (result.mu.active(i, j) && result.mu.value(i, j) >= -1.0 + delta)
            measure += grid.weights()[i];
        c4 = std::max(c4, measure * delta * k * k / (std::log(k) + 1.0));
      }
    }
    rep.items.push_back({"mu_decay", true, 0.0, c4, "fitted C4"});
  }
  return rep;
}

RegularityReport regularity_report(const CoefficientField& f, double x_lo) {
  const int n = f.grid().size();
  ArrayXd m_u = ArrayXd::Zero(n), m_ux = ArrayXd::Zero(n), m_uxx = ArrayXd::Zero(n),
          m_uxy = ArrayXd::Zero(n), m_uyy = ArrayXd::Zero(n),
          m_uxyy = ArrayXd::Zero(n);
  for (int j = 0; j < f.n_modes(); ++j) {
    const double k2 = f.k(j) * f.k(j);
    const ArrayXd a = f.amp().col(j);
    const ArrayXd da = f.grid().deriv(a);
    const ArrayXd dda = f.grid().second_deriv(a);
    m_u += a.square();
    m_ux += da.square();
    m_uxx += dda.square();
    m_uxy += da.square() * k2;
    m_uyy += a.square() * k2 * k2;
    m_uxyy += da.square() * k2 * k2;
  }

  struct Def {
    const char* name;
    const char* envelope;
    const ArrayXd* moment;
    int pow_x;
    int pow_log;
  };
  const Def defs[6] = {
      {"u", "x^2 (|ln x|+1)", &m_u, 2, 1},
      {"u_x", "|ln x|+1", &m_ux, 0, 1},
      {"u_xx", "x^-2 (|ln x|^7+1)", &m_uxx, -2, 7},
      {"u_xy", "x^-1 (|ln x|^2+1)", &m_uxy, -1, 2},
      {"u_yy", "|ln x|+1", &m_uyy, 0, 1},
      {"u_xyy", "x^-2 (|ln x|^3+1)", &m_uxyy, -2, 3},
  };

  RegularityReport rep;
  rep.x_lo = x_lo;
  for (const auto& d : defs) {
    RegularityReport::Entry e{d.name, d.envelope, 0.0, 0.0};
    for (int i = 1; i < n; ++i) {
      const double x = f.grid().node(i);
      if (x < x_lo) continue;
      const double env = std::pow(x, d.pow_x) *
                         (std::pow(std::abs(std::log(x)), d.pow_log) + 1.0);
      const double ratio = (*d.moment)[i] / env;
      if (ratio > e.fitted_constant) {
        e.fitted_constant = ratio;
        e.at_x = x;
      }
    }
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace wrinkle
