#include "wrinkle/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace wrinkle {

CoefficientField::CoefficientField(FrequencyGrid freq, XGrid grid,
                                   std::vector<int> modes, ArrayXXd amp)
    : freq_(freq), grid_(std::move(grid)), modes_(std::move(modes)),
      amp_(std::move(amp)) {
  if (modes_.empty()) amp_.resize(grid_.size(), 0);
  if (amp_.rows() != grid_.size() ||
      amp_.cols() != static_cast<Eigen::Index>(modes_.size()))
    throw std::invalid_argument("CoefficientField: amplitude shape mismatch");
  for (size_t j = 0; j < modes_.size(); ++j) {
    if (modes_[j] < 1 || modes_[j] > freq_.mode_cap())
      throw std::invalid_argument("CoefficientField: mode index outside cap");
    if (j > 0 && modes_[j] <= modes_[j - 1])
      throw std::invalid_argument("CoefficientField: modes must be sorted");
  }
  k_.resize(modes_.size());
  for (size_t j = 0; j < modes_.size(); ++j) k_[j] = freq_.wavenumber(modes_[j]);
  enforce_invariants();
}

CoefficientField CoefficientField::zero(FrequencyGrid freq, XGrid grid) {
  return CoefficientField(freq, std::move(grid), {}, ArrayXXd());
}

void CoefficientField::enforce_invariants() {
  if (n_modes() == 0) {
    amp_.resize(grid_.size(), 0);
    return;
  }
  const double floor = -1e-14;
  if ((amp_ < floor).any())
    throw std::invalid_argument(
        "CoefficientField: negative amplitude beyond the clamp tolerance");
  amp_ = amp_.max(0.0);
  amp_.row(0).setZero();
}

TwoSidedField TwoSidedField::from_odd(const CoefficientField& f) {
  TwoSidedField out;
  out.freq = f.freq();
  out.grid = f.grid();
  out.sin_modes = f.modes();
  out.sin_amp = f.amp();
  out.cos_amp.resize(f.grid().size(), 0);
  return out;
}

EnergySample energy(const CoefficientField& f) {
  EnergySample s;
  s.density = ArrayXd::Zero(f.grid().size());
  for (int j = 0; j < f.n_modes(); ++j) {
    const ArrayXd a = f.amp().col(j);
    const double k4 = std::pow(f.k(j), 4);
    s.membrane += f.grid().dirichlet(a);
    s.bending += k4 * f.grid().quad(a.square());
    s.density += f.grid().dirichlet_density(a) + k4 * a.square();
  }
  s.total = s.membrane + s.bending;
  return s;
}

EnergySample energy(const TwoSidedField& f) {
  EnergySample s;
  s.density = ArrayXd::Zero(f.grid.size());
  auto add = [&](const std::vector<int>& modes, const ArrayXXd& amp, bool cosine) {
    for (size_t j = 0; j < modes.size(); ++j) {
      const ArrayXd a = amp.col(j);
      if (cosine && modes[j] == 0) {
        // constant-in-y component carries a quarter of the membrane weight
        s.membrane += f.grid.dirichlet(a) / 4;
        s.density += f.grid.dirichlet_density(a) / 4;
        continue;
      }
      const double k4 = std::pow(f.freq.wavenumber(modes[j]), 4);
      s.membrane += f.grid.dirichlet(a);
      s.bending += k4 * f.grid.quad(a.square());
      s.density += f.grid.dirichlet_density(a) + k4 * a.square();
    }
  };
  add(f.sin_modes, f.sin_amp, false);
  add(f.cos_modes, f.cos_amp, true);
  s.total = s.membrane + s.bending;
  return s;
}

ArrayXd constraint_sum(const CoefficientField& f) {
  ArrayXd s = ArrayXd::Zero(f.grid().size());
  for (int j = 0; j < f.n_modes(); ++j)
    s += f.amp().col(j).square() * (f.k(j) * f.k(j));
  return s;
}

ArrayXd constraint_sum(const TwoSidedField& f) {
  ArrayXd s = ArrayXd::Zero(f.grid.size());
  for (size_t j = 0; j < f.sin_modes.size(); ++j) {
    const double k = f.freq.wavenumber(f.sin_modes[j]);
    s += f.sin_amp.col(j).square() * (k * k);
  }
  for (size_t j = 0; j < f.cos_modes.size(); ++j) {
    if (f.cos_modes[j] == 0) continue;
    const double k = f.freq.wavenumber(f.cos_modes[j]);
    s += f.cos_amp.col(j).square() * (k * k);
  }
  return s;
}

ArrayXd constraint_residual(const CoefficientField& f) {
  return constraint_sum(f) - 2.0 * f.grid().nodes();
}

CoefficientField combine(const CoefficientField& a, const CoefficientField& b) {
  if (!(a.freq() == b.freq()) || !(a.grid() == b.grid()))
    throw std::invalid_argument("combine: fields live on different grids");
  std::vector<int> modes = a.modes();
  modes.insert(modes.end(), b.modes().begin(), b.modes().end());
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());

  ArrayXXd amp = ArrayXXd::Zero(a.grid().size(), modes.size());
  auto accumulate = [&](const CoefficientField& f) {
    for (int j = 0; j < f.n_modes(); ++j) {
      const auto it = std::lower_bound(modes.begin(), modes.end(), f.modes()[j]);
      const int col = static_cast<int>(it - modes.begin());
      amp.col(col) += f.amp().col(j).square();
    }
  };
  accumulate(a);
  accumulate(b);
  amp = amp.sqrt();
  return CoefficientField(a.freq(), a.grid(), std::move(modes), std::move(amp));
}

CoefficientField symmetrize_odd(const TwoSidedField& full) {
  std::vector<int> modes = full.sin_modes;
  for (int m : full.cos_modes)
    if (m >= 1) modes.push_back(m);
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());

  ArrayXXd amp = ArrayXXd::Zero(full.grid.size(), modes.size());
  for (size_t j = 0; j < full.sin_modes.size(); ++j) {
    const auto it = std::lower_bound(modes.begin(), modes.end(), full.sin_modes[j]);
    amp.col(it - modes.begin()) += full.sin_amp.col(j).square();
  }
  for (size_t j = 0; j < full.cos_modes.size(); ++j) {
    if (full.cos_modes[j] < 1) continue;
    const auto it = std::lower_bound(modes.begin(), modes.end(), full.cos_modes[j]);
    amp.col(it - modes.begin()) += full.cos_amp.col(j).square();
  }
  amp = amp.sqrt();
  return CoefficientField(full.freq, full.grid, std::move(modes), std::move(amp));
}

FieldSamples synthesize(const CoefficientField& f, int y_samples) {
  const int m_max = f.n_modes() ? f.modes().back() : 0;
  if (y_samples < 2 * m_max + 1)
    throw std::invalid_argument(
        "synthesize: y_samples too small, represented modes would alias");
  const double L = f.freq().half_period();
  FieldSamples out;
  out.y.resize(y_samples);
  for (int j = 0; j < y_samples; ++j)
    out.y[j] = -L + 2.0 * L * j / y_samples;

  Eigen::MatrixXd table(f.n_modes(), y_samples);
  for (int r = 0; r < f.n_modes(); ++r)
    for (int j = 0; j < y_samples; ++j)
      table(r, j) = std::sin(f.k(r) * out.y[j]);
  out.u = (f.amp().matrix() * table).array();
  return out;
}

CoefficientField rescale(const CoefficientField& f, double alpha) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("rescale: alpha must be >= 1");
  bool rational = false;
  for (int q = 1; q <= 64; ++q) {
    const double p = alpha * q;
    if (std::abs(p - std::round(p)) < 1e-9 * q) { rational = true; break; }
  }
  if (!rational)
    throw std::invalid_argument(
        "rescale: alpha must be rational with denominator <= 64 so the target "
        "wavenumbers stay exactly representable");
  FrequencyGrid target(alpha * f.freq().half_period(), f.freq().mode_cap());
  return CoefficientField(target, f.grid(), f.modes(), f.amp() * alpha);
}

CoefficientField extend_periodic(const CoefficientField& f, int n_copies,
                                 int new_mode_cap) {
  if (n_copies < 1) throw std::invalid_argument("extend_periodic: N must be >= 1");
  const double newL = n_copies * f.freq().half_period();
  if (new_mode_cap < 0)
    new_mode_cap = std::max(n_copies * f.freq().mode_cap(),
                            2 * static_cast<int>(std::floor(newL)));
  std::vector<int> modes(f.modes().size());
  for (size_t j = 0; j < modes.size(); ++j) {
    modes[j] = f.modes()[j] * n_copies;
    if (modes[j] > new_mode_cap)
      throw std::invalid_argument("extend_periodic: mode cap exceeded, need M >= " +
                                  std::to_string(f.modes().back() * n_copies));
  }
  FrequencyGrid target(newL, new_mode_cap);
  return CoefficientField(target, f.grid(), std::move(modes), f.amp());
}

CoefficientField truncate_modes(const CoefficientField& f, double rel_floor) {
  const double cut = rel_floor * f.max_amplitude();
  std::vector<int> modes;
  std::vector<int> cols;
  for (int j = 0; j < f.n_modes(); ++j) {
    if (f.amp().col(j).maxCoeff() >= cut) {
      modes.push_back(f.modes()[j]);
      cols.push_back(j);
    }
  }
  if (modes.empty() && f.n_modes() > 0) {
    int jbig = 0;
    for (int j = 1; j < f.n_modes(); ++j)
      if (f.amp().col(j).maxCoeff() > f.amp().col(jbig).maxCoeff()) jbig = j;
    modes = {f.modes()[jbig]};
    cols = {jbig};
  }
  ArrayXXd amp(f.grid().size(), modes.size());
  for (size_t c = 0; c < cols.size(); ++c) amp.col(c) = f.amp().col(cols[c]);
  return CoefficientField(f.freq(), f.grid(), std::move(modes), std::move(amp));
}

}  // namespace wrinkle
