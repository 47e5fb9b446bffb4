#include "wrinkle/grids.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wrinkle {

FrequencyGrid::FrequencyGrid(double half_period, int mode_cap)
    : L_(half_period), M_(mode_cap) {
  if (!(L_ >= 1.0))
    throw std::invalid_argument("FrequencyGrid: half period must be >= 1");
  if (M_ < 2 * static_cast<int>(std::floor(L_)))
    throw std::invalid_argument(
        "FrequencyGrid: mode cap below 2*floor(L), base octave not representable");
}

FrequencyGrid FrequencyGrid::with_default_cap(double half_period) {
  const int base = 2 * static_cast<int>(std::floor(half_period));
  return FrequencyGrid(half_period, base * 256);
}

double FrequencyGrid::wavenumber(int m) const {
  if (m < 1 || m > M_)
    throw std::out_of_range("FrequencyGrid: mode index out of range");
  return M_PI * static_cast<double>(m) / L_;
}

double FrequencyGrid::base_wavenumber() const {
  return M_PI * std::floor(L_) / L_;
}

XGrid::XGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 3)
    throw std::invalid_argument("XGrid: need at least 3 nodes");
  for (size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1]))
      throw std::invalid_argument("XGrid: nodes must be strictly increasing");
  node_array_ = Eigen::Map<const ArrayXd>(nodes_.data(), nodes_.size());
  build_stencils();
}

XGrid XGrid::graded_unit(int n_cells, double gamma) {
  if (n_cells < 2) throw std::invalid_argument("XGrid: n_cells < 2");
  std::vector<double> x(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i)
    x[i] = std::pow(static_cast<double>(i) / n_cells, gamma);
  x.front() = 0.0;
  x.back() = 1.0;
  return XGrid(std::move(x));
}

XGrid XGrid::symmetric_graded(int n_half_cells, double gamma) {
  if (n_half_cells < 2) throw std::invalid_argument("XGrid: n_half_cells < 2");
  std::vector<double> x;
  x.reserve(2 * n_half_cells + 1);
  for (int i = -n_half_cells; i <= n_half_cells; ++i) {
    const double t = std::pow(std::abs(i) / static_cast<double>(n_half_cells), gamma);
    x.push_back(i < 0 ? -t : t);
  }
  x.front() = -1.0;
  x.back() = 1.0;
  x[n_half_cells] = 0.0;
  return XGrid(std::move(x));
}

XGrid XGrid::uniform(double a, double b, int n_cells) {
  if (!(b > a) || n_cells < 2) throw std::invalid_argument("XGrid: bad uniform range");
  std::vector<double> x(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i)
    x[i] = a + (b - a) * static_cast<double>(i) / n_cells;
  x.back() = b;
  return XGrid(std::move(x));
}

XGrid XGrid::from_nodes(std::vector<double> nodes) { return XGrid(std::move(nodes)); }

void XGrid::build_stencils() {
  const int n = size();
  weights_.resize(n);
  weights_.setZero();
  for (int i = 0; i + 1 < n; ++i) {
    const double h = nodes_[i + 1] - nodes_[i];
    weights_[i] += h / 2;
    weights_[i + 1] += h / 2;
  }

  d1_lo_.resize(n);
  d1_mid_.resize(n);
  d1_hi_.resize(n);
  d1_lo_.setZero();
  d1_mid_.setZero();
  d1_hi_.setZero();
  for (int i = 1; i + 1 < n; ++i) {
    const double hm = nodes_[i] - nodes_[i - 1];
    const double hp = nodes_[i + 1] - nodes_[i];
    d1_lo_[i] = -hp / (hm * (hm + hp));
    d1_mid_[i] = (hp - hm) / (hm * hp);
    d1_hi_[i] = hm / (hp * (hm + hp));
  }
  {
    const double h0 = nodes_[1] - nodes_[0];
    const double h1 = nodes_[2] - nodes_[1];
    end0_[0] = -(2 * h0 + h1) / (h0 * (h0 + h1));
    end0_[1] = (h0 + h1) / (h0 * h1);
    end0_[2] = -h0 / (h1 * (h0 + h1));
  }
  {
    const double hN = nodes_[n - 1] - nodes_[n - 2];
    const double hM = nodes_[n - 2] - nodes_[n - 3];
    endN_[2] = (2 * hN + hM) / (hN * (hN + hM));
    endN_[1] = -(hN + hM) / (hN * hM);
    endN_[0] = hN / (hM * (hN + hM));
  }


  dirichlet_diag_.resize(n);
  dirichlet_diag_.setZero();
  for (int i = 0; i + 1 < n; ++i) {
    const double inv_h = 1.0 / (nodes_[i + 1] - nodes_[i]);
    dirichlet_diag_[i] += inv_h;
    dirichlet_diag_[i + 1] += inv_h;
  }
}

double XGrid::dirichlet(const ArrayXd& f) const {
  double s = 0.0;
  for (int i = 0; i + 1 < size(); ++i) {
    const double d = f[i + 1] - f[i];
    s += d * d / (nodes_[i + 1] - nodes_[i]);
  }
  return s;
}

void XGrid::add_dirichlet_grad(const ArrayXd& f, double coef, ArrayXd& out) const {
  for (int i = 0; i + 1 < size(); ++i) {
    const double g = coef * 2.0 * (f[i + 1] - f[i]) / (nodes_[i + 1] - nodes_[i]);
    out[i] -= g;
    out[i + 1] += g;
  }
}

ArrayXd XGrid::dirichlet_density(const ArrayXd& f) const {
  const int n = size();
  ArrayXd out = ArrayXd::Zero(n);
  for (int i = 0; i + 1 < n; ++i) {
    const double h = nodes_[i + 1] - nodes_[i];
    const double d = (f[i + 1] - f[i]) / h;
    out[i] += d * d * h / 2;
    out[i + 1] += d * d * h / 2;
  }
  return out / weights_;
}

ArrayXd XGrid::deriv(const ArrayXd& f) const {
  const int n = size();
  ArrayXd out(n);
  out[0] = end0_[0] * f[0] + end0_[1] * f[1] + end0_[2] * f[2];
  for (int i = 1; i + 1 < n; ++i)
    out[i] = d1_lo_[i] * f[i - 1] + d1_mid_[i] * f[i] + d1_hi_[i] * f[i + 1];
  out[n - 1] = endN_[0] * f[n - 3] + endN_[1] * f[n - 2] + endN_[2] * f[n - 1];
  return out;
}

ArrayXd XGrid::derivT_weighted(const ArrayXd& v) const {
  const int n = size();
  ArrayXd out(n);
  out.setZero();
  const double wv0 = weights_[0] * v[0];
  out[0] += end0_[0] * wv0;
  out[1] += end0_[1] * wv0;
  out[2] += end0_[2] * wv0;
  for (int i = 1; i + 1 < n; ++i) {
    const double wv = weights_[i] * v[i];
    out[i - 1] += d1_lo_[i] * wv;
    out[i] += d1_mid_[i] * wv;
    out[i + 1] += d1_hi_[i] * wv;
  }
  const double wvN = weights_[n - 1] * v[n - 1];
  out[n - 3] += endN_[0] * wvN;
  out[n - 2] += endN_[1] * wvN;
  out[n - 1] += endN_[2] * wvN;
  return out;
}

ArrayXd XGrid::second_deriv(const ArrayXd& f) const {
  const int n = size();
  ArrayXd out(n);
  for (int i = 1; i + 1 < n; ++i) {
    const double hm = nodes_[i] - nodes_[i - 1];
    const double hp = nodes_[i + 1] - nodes_[i];
    out[i] = 2 * (f[i - 1] / (hm * (hm + hp)) - f[i] / (hm * hp) +
                  f[i + 1] / (hp * (hm + hp)));
  }
  // constant-curvature estimate from the three nearest nodes
  {
    const double hm = nodes_[1] - nodes_[0];
    const double hp = nodes_[2] - nodes_[1];
    out[0] = 2 * (f[0] / (hm * (hm + hp)) - f[1] / (hm * hp) +
                  f[2] / (hp * (hm + hp)));
  }
  {
    const double hm = nodes_[n - 2] - nodes_[n - 3];
    const double hp = nodes_[n - 1] - nodes_[n - 2];
    out[n - 1] = 2 * (f[n - 3] / (hm * (hm + hp)) - f[n - 2] / (hm * hp) +
                      f[n - 1] / (hp * (hm + hp)));
  }
  return out;
}

int XGrid::lower_node(double x) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
  return static_cast<int>(it - nodes_.begin());
}

double XGrid::interp(const ArrayXd& f, double x) const {
  const int n = size();
  if (x <= nodes_.front()) return f[0];
  if (x >= nodes_.back()) return f[n - 1];
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const int j = static_cast<int>(it - nodes_.begin());
  const double t = (x - nodes_[j - 1]) / (nodes_[j] - nodes_[j - 1]);
  return (1 - t) * f[j - 1] + t * f[j];
}

}  // namespace wrinkle
