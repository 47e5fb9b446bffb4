#include "wrinkle/fvk.hpp"

#include <cmath>
#include <stdexcept>

namespace wrinkle {

namespace {

double smoothstep(double u) { return u * u * u * (10 + u * (-15 + 6 * u)); }
double smoothstep_d(double u) { return 30 * u * u * (1 + u * (-2 + u)); }
double smoothstep_dd(double u) { return 60 * u * (1 + u * (-3 + 2 * u)); }

// centered second-order x-derivative, one-sided at the ends
ArrayXXd dx_of(const ArrayXXd& f, double h) {
  const int nr = static_cast<int>(f.rows());
  ArrayXXd out(nr, f.cols());
  out.row(0) = (-3.0 * f.row(0) + 4.0 * f.row(1) - f.row(2)) / (2 * h);
  for (int i = 1; i + 1 < nr; ++i)
    out.row(i) = (f.row(i + 1) - f.row(i - 1)) / (2 * h);
  out.row(nr - 1) =
      (3.0 * f.row(nr - 1) - 4.0 * f.row(nr - 2) + f.row(nr - 3)) / (2 * h);
  return out;
}

ArrayXXd dxx_of(const ArrayXXd& f, double h) {
  const int nr = static_cast<int>(f.rows());
  ArrayXXd out(nr, f.cols());
  const double h2 = h * h;
  out.row(0) = (2.0 * f.row(0) - 5.0 * f.row(1) + 4.0 * f.row(2) - f.row(3)) / h2;
  for (int i = 1; i + 1 < nr; ++i)
    out.row(i) = (f.row(i + 1) - 2.0 * f.row(i) + f.row(i - 1)) / h2;
  out.row(nr - 1) = (2.0 * f.row(nr - 1) - 5.0 * f.row(nr - 2) +
                     4.0 * f.row(nr - 3) - f.row(nr - 4)) / h2;
  return out;
}

// periodic centered y-derivative over the ny logical columns; the closure
// column copies column 0
ArrayXXd dy_of(const ArrayXXd& f, double h) {
  const int ny = static_cast<int>(f.cols()) - 1;
  ArrayXXd out(f.rows(), ny + 1);
  for (int j = 0; j < ny; ++j) {
    const int jp = (j + ny - 1) % ny;
    const int jn = (j + 1) % ny;
    out.col(j) = (f.col(jn) - f.col(jp)) / (2 * h);
  }
  out.col(ny) = out.col(0);
  return out;
}

ArrayXXd dyy_of(const ArrayXXd& f, double h) {
  const int ny = static_cast<int>(f.cols()) - 1;
  ArrayXXd out(f.rows(), ny + 1);
  const double h2 = h * h;
  for (int j = 0; j < ny; ++j) {
    const int jp = (j + ny - 1) % ny;
    const int jn = (j + 1) % ny;
    out.col(j) = (f.col(jn) - 2.0 * f.col(j) + f.col(jp)) / h2;
  }
  out.col(ny) = out.col(0);
  return out;
}

// cumulative trapezoid in y anchored at y = 0 (column ny/2)
ArrayXXd cumtrap_y(const ArrayXXd& f, double h) {
  const int ny = static_cast<int>(f.cols()) - 1;
  const int j0 = ny / 2;
  ArrayXXd out(f.rows(), ny + 1);
  out.col(j0).setZero();
  for (int j = j0; j < ny; ++j)
    out.col(j + 1) = out.col(j) + 0.5 * h * (f.col(j) + f.col(j + 1));
  for (int j = j0; j > 0; --j)
    out.col(j - 1) = out.col(j) - 0.5 * h * (f.col(j - 1) + f.col(j));
  return out;
}

// per-row trapezoid average over one y-period, (1/(2 Lp)) int dy
ArrayXd yavg(const ArrayXXd& f, double h, double two_lp) {
  const int ny = static_cast<int>(f.cols()) - 1;
  ArrayXd out = 0.5 * (f.col(0) + f.col(ny));
  for (int j = 1; j < ny; ++j) out += f.col(j);
  return out * (h / two_lp);
}

// composite Simpson over rows [i0, i1] of per-row values
double simpson(const ArrayXd& v, int i0, int i1, double h) {
  const int n = i1 - i0;
  if (n % 2 != 0) throw std::logic_error("simpson: odd interval count");
  double s = v[i0] + v[i1];
  for (int i = i0 + 1; i < i1; ++i) s += ((i - i0) % 2 ? 4.0 : 2.0) * v[i];
  return s * h / 3.0;
}

}  // namespace

double CutoffProfile::value(double x) const {
  const double t = 2 * x / delta - 1;
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  return smoothstep(t);
}

double CutoffProfile::deriv(double x) const {
  const double t = 2 * x / delta - 1;
  if (t <= 0 || t >= 1) return 0.0;
  return smoothstep_d(t) * 2 / delta;
}

double CutoffProfile::second_deriv(double x) const {
  const double t = 2 * x / delta - 1;
  if (t <= 0 || t >= 1) return 0.0;
  return smoothstep_dd(t) * 4 / (delta * delta);
}

CutoffProfile cutoff(double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("cutoff: delta must lie in (0,1)");
  return CutoffProfile{delta};
}

double DeformationField::periodicity_mismatch() const {
  const int n = ny();
  double m = (w1.col(0) - w1.col(n)).abs().maxCoeff();
  m = std::max(m, (w2.col(0) - w2.col(n)).abs().maxCoeff());
  m = std::max(m, (u3.col(0) - u3.col(n)).abs().maxCoeff());
  return m;
}

void DeformationField::validate() const {
  if (nx() < 8 || nx() % 4 != 0)
    throw std::invalid_argument("DeformationField: nx must be a multiple of 4");
  if (ny() < 4 || ny() % 2 != 0)
    throw std::invalid_argument("DeformationField: ny must be even");
  if (w1.rows() != x.size() || w1.cols() != y.size() || w2.rows() != x.size() ||
      w2.cols() != y.size() || u3.rows() != x.size() || u3.cols() != y.size())
    throw std::invalid_argument("DeformationField: array shape mismatch");
  if (std::abs(x[0] + 1.0) > 1e-14 || std::abs(x[nx()] - 1.0) > 1e-14)
    throw std::invalid_argument("DeformationField: x must span [-1,1]");
  const double ratio = L / Lp;
  if (!(Lp > 0) || std::abs(ratio - std::round(ratio)) > 1e-9)
    throw std::invalid_argument("DeformationField: L must be an integer multiple of Lp");
  if (periodicity_mismatch() > 1e-10)
    throw std::invalid_argument("DeformationField: field is not 2Lp-periodic in y");
  if (k_max_hint > 0.0 && k_max_hint > M_PI / (2 * hy()))
    throw std::invalid_argument(
        "DeformationField: grid does not resolve the active wavenumbers "
        "(Nyquist margin < 2)");
}

namespace {
DeformationField blank(double L, int nx, int ny) {
  DeformationField d;
  d.L = L;
  d.Lp = L;
  d.x.setLinSpaced(nx + 1, -1.0, 1.0);
  d.y.setLinSpaced(ny + 1, -L, L);
  d.w1 = ArrayXXd::Zero(nx + 1, ny + 1);
  d.w2 = ArrayXXd::Zero(nx + 1, ny + 1);
  d.u3 = ArrayXXd::Zero(nx + 1, ny + 1);
  return d;
}
}  // namespace

DeformationField planar_deformation(double L, int nx, int ny) {
  DeformationField d = blank(L, nx, ny);
  d.w1.colwise() = d.x;
  return d;
}

DeformationField zero_deformation(double L, int nx, int ny) { return blank(L, nx, ny); }

EnergyBreakdown evaluate_EL(const DeformationField& d) {
  d.validate();
  const int nx = d.nx(), ny = d.ny();
  const double hx = d.hx(), hy = d.hy();
  const double two_lp = 2 * d.Lp;
  const double L2 = d.L * d.L;

  const ArrayXXd w1x = dx_of(d.w1, hx);
  const ArrayXXd w2x = dx_of(d.w2, hx);
  const ArrayXXd u3x = dx_of(d.u3, hx);
  const ArrayXXd u3y = dy_of(d.u3, hy);
  const ArrayXXd u3yy = dyy_of(d.u3, hy);

  EnergyBreakdown e;

  {  // stretch square term
    const ArrayXXd a = w1x + u3x.square() / (2 * L2) - 1.0;
    e.t1a = simpson(yavg(a.square(), hy, two_lp), 0, nx, hx);
  }
  e.t1b = -2.0;
  {  // transverse mismatch, staggered in y so the cumulative w2 cancels
    ArrayXd v(nx + 1);
    for (int i = 0; i <= nx; ++i) {
      double acc = 0.0;
      for (int j = 0; j < ny; ++j) {
        const double w2y = (d.w2(i, j + 1) - d.w2(i, j)) / hy;
        const double q = (u3y(i, j) * u3y(i, j) + u3y(i, j + 1) * u3y(i, j + 1)) / 4;
        const double m = w2y + q - d.x[i];
        acc += m * m;
      }
      v[i] = acc * hy / two_lp;
    }
    e.t1c = simpson(v, 0, nx / 2, hx);
    e.t2 = simpson(v, nx / 2, nx, hx);
  }
  {  // shear term
    ArrayXd v(nx + 1);
    for (int i = 0; i <= nx; ++i) {
      double acc = 0.0;
      for (int j = 0; j < ny; ++j) {
        const double w1y = (d.w1(i, j + 1) - d.w1(i, j)) / hy;
        const double pj = w2x(i, j) + u3x(i, j) * u3y(i, j);
        const double pj1 = w2x(i, j + 1) + u3x(i, j + 1) * u3y(i, j + 1);
        const double m = L2 * w1y + 0.5 * (pj + pj1);
        acc += 0.5 * m * m;
      }
      v[i] = acc * hy / two_lp;
    }
    e.t3 = simpson(v, 0, nx, hx) / L2;
  }
  {  // scalar energy term
    const ArrayXXd g = u3x.square() + u3yy.square();
    e.t4 = simpson(yavg(g, hy, two_lp), 0, nx, hx) / L2;
  }
  {  // higher-order bending remainder
    const ArrayXXd u3xy = dx_of(u3y, hx);
    const ArrayXXd u3xx = dxx_of(d.u3, hx);
    const ArrayXXd g = 2.0 * u3xy.square() + u3xx.square() / L2;
    e.t5 = simpson(yavg(g, hy, two_lp), 0, nx, hx) / (L2 * L2);
  }
  return e;
}

DeformationField assemble_upper_bound(const CoefficientField& u, int n_copies,
                                      double delta, int nx, int ny) {
  if (n_copies < 1) throw std::invalid_argument("assemble_upper_bound: N >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("assemble_upper_bound: delta must lie in (0,1)");
  if (u.n_modes() == 0)
    throw std::invalid_argument("assemble_upper_bound: empty coefficient field");

  const double L0 = u.freq().half_period();
  DeformationField d;
  d.L = n_copies * L0;
  d.Lp = L0;
  d.x.setLinSpaced(nx + 1, -1.0, 1.0);
  d.y.setLinSpaced(ny + 1, -L0, L0);
  const double hy = d.y[1] - d.y[0];
  const double hx = d.x[1] - d.x[0];
  if (nx % 4 != 0 || ny % 2 != 0)
    throw std::invalid_argument("assemble_upper_bound: need nx % 4 == 0, ny even");

  const int J = u.n_modes();
  d.k_max_hint = u.wavenumbers().maxCoeff();
  if (d.k_max_hint > M_PI / (2 * hy))
    throw std::invalid_argument(
        "assemble_upper_bound: ny too small for the active wavenumbers "
        "(Nyquist margin < 2)");

  // interpolate the coefficients onto the uniform x-nodes and re-project
  // against the grid wavenumbers sin(k h)/h so that the discrete per-slice
  // arclength identity holds exactly
  ArrayXd kd(J);
  for (int j = 0; j < J; ++j) kd[j] = std::sin(u.k(j) * hy) / hy;
  ArrayXXd coef = ArrayXXd::Zero(nx + 1, J);
  for (int i = 0; i <= nx; ++i) {
    const double xi = d.x[i];
    if (xi <= 0.0) continue;
    double s = 0.0;
    for (int j = 0; j < J; ++j) {
      const double a = u.grid().interp(u.amp().col(j), xi);
      coef(i, j) = a;
      s += a * a * kd[j] * kd[j];
    }
    if (!(s > 0.0))
      throw std::invalid_argument(
          "assemble_upper_bound: interpolated field carries no amplitude at x = " +
          std::to_string(xi));
    coef.row(i) *= std::sqrt(2.0 * xi / s);
  }

  // odd-exact sine table; the period-end columns are exactly zero
  Eigen::MatrixXd table(J, ny + 1);
  for (int j = 0; j < J; ++j) {
    for (int jj = 0; jj <= ny; ++jj) {
      const double yv = d.y[jj];
      double s = std::sin(u.k(j) * std::abs(yv));
      table(j, jj) = (yv < 0 ? -s : s);
    }
    table(j, 0) = 0.0;
    table(j, ny) = 0.0;
    table(j, ny / 2) = 0.0;
  }

  const CutoffProfile phi = cutoff(delta);
  d.u3 = (coef.matrix() * table).array() * std::sqrt(2.0);
  ArrayXd phix(nx + 1);
  for (int i = 0; i <= nx; ++i) phix[i] = phi.value(d.x[i]);
  d.u3.colwise() *= phix;

  const ArrayXXd u3y = dy_of(d.u3, hy);
  d.w2 = cumtrap_y(0.5 * u3y.square(), hy) * (-1.0);
  for (int i = 0; i <= nx; ++i)
    d.w2.row(i) += phix[i] * phix[i] * d.x[i] * d.y.transpose();

  const ArrayXXd w2x = dx_of(d.w2, hx);
  const ArrayXXd u3x = dx_of(d.u3, hx);
  const ArrayXXd p = w2x + u3x * u3y;
  d.w1 = cumtrap_y(p, hy) * (-1.0 / (d.L * d.L));
  d.w1.colwise() += d.x;
  return d;
}

PhysicalDeformation unrescale(const DeformationField& d) {
  PhysicalDeformation p;
  p.L = d.L;
  p.h = 1.0 / (d.L * d.L);
  p.Lp = d.Lp / d.L;
  p.x = d.x;
  p.Y = d.y / d.L;
  p.W1 = d.w1;
  p.W2 = d.w2 / d.L;
  p.U3 = d.u3 / d.L;
  p.k_max_hint = d.k_max_hint * d.L;
  return p;
}

DeformationField rescale_deformation(const PhysicalDeformation& p) {
  DeformationField d;
  d.L = p.L;
  d.Lp = p.Lp * p.L;
  d.x = p.x;
  d.y = p.Y * p.L;
  d.w1 = p.W1;
  d.w2 = p.W2 * p.L;
  d.u3 = p.U3 * p.L;
  d.k_max_hint = p.k_max_hint / p.L;
  return d;
}

double evaluate_Eh(const PhysicalDeformation& p) {
  const int nx = static_cast<int>(p.x.size()) - 1;
  const int ny = static_cast<int>(p.Y.size()) - 1;
  const double hx = p.x[1] - p.x[0];
  const double hy = p.Y[1] - p.Y[0];
  const double two_lp = 2 * p.Lp;

  const ArrayXXd W1x = dx_of(p.W1, hx);
  const ArrayXXd W2x = dx_of(p.W2, hx);
  const ArrayXXd U3x = dx_of(p.U3, hx);
  const ArrayXXd U3y = dy_of(p.U3, hy);
  const ArrayXXd U3yy = dyy_of(p.U3, hy);

  double total = 0.0;
  {  // |e11|^2 = (W1_x + U3_x^2/2)^2
    const ArrayXXd m11 = W1x + 0.5 * U3x.square();
    total += simpson(yavg(m11.square(), hy, two_lp), 0, nx, hx);
  }
  {  // |e22 - x|^2 and the shear part, staggered in Y
    ArrayXd v22(nx + 1), v12(nx + 1);
    for (int i = 0; i <= nx; ++i) {
      double a22 = 0.0, a12 = 0.0;
      for (int j = 0; j < ny; ++j) {
        const double W2y = (p.W2(i, j + 1) - p.W2(i, j)) / hy;
        const double q = (U3y(i, j) * U3y(i, j) + U3y(i, j + 1) * U3y(i, j + 1)) / 4;
        const double m22 = W2y + q - p.x[i];
        a22 += m22 * m22;
        const double W1y = (p.W1(i, j + 1) - p.W1(i, j)) / hy;
        const double pj = W2x(i, j) + U3x(i, j) * U3y(i, j);
        const double pj1 = W2x(i, j + 1) + U3x(i, j + 1) * U3y(i, j + 1);
        const double m12 = W1y + 0.5 * (pj + pj1);
        a12 += 0.5 * m12 * m12;
      }
      v22[i] = a22 * hy / two_lp;
      v12[i] = a12 * hy / two_lp;
    }
    total += simpson(v22, 0, nx, hx) + simpson(v12, 0, nx, hx);
  }
  {  // bending
    const ArrayXXd U3xy = dx_of(U3y, hx);
    const ArrayXXd U3xx = dxx_of(p.U3, hx);
    const ArrayXXd g = U3xx.square() + 2.0 * U3xy.square() + U3yy.square();
    total += p.h * p.h * simpson(yavg(g, hy, two_lp), 0, nx, hx);
  }
  // traction work, as the volume integral of W1_x
  total -= 2.0 * simpson(yavg(W1x, hy, two_lp), 0, nx, hx);
  return total;
}

}  // namespace wrinkle
