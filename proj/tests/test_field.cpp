#include <doctest.h>

#include "wrinkle/field.hpp"

#include <cmath>
#include <random>

using namespace wrinkle;

namespace {

CoefficientField random_field(const FrequencyGrid& freq, const XGrid& grid,
                              std::vector<int> modes, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  ArrayXXd amp(grid.size(), modes.size());
  for (int j = 0; j < amp.cols(); ++j)
    for (int i = 0; i < amp.rows(); ++i)
      amp(i, j) = uni(rng) * grid.node(i) / freq.wavenumber(modes[j]);
  return CoefficientField(freq, grid, std::move(modes), std::move(amp));
}

}  // namespace

TEST_CASE("energy of the zero field is zero") {
  auto f = CoefficientField::zero(FrequencyGrid(1.0, 16), XGrid::graded_unit(32));
  EnergySample e = energy(f);
  CHECK(e.total == 0.0);
  CHECK(e.membrane == 0.0);
  CHECK(e.bending == 0.0);
}

TEST_CASE("single linear mode reproduces the closed-form energy") {
  // a(x) = x at k = pi on L = 1: S = int_0^1 1 + x^2 pi^4 dx = 1 + pi^4/3
  FrequencyGrid freq(1.0, 16);
  XGrid grid = XGrid::graded_unit(256, 2.0);
  ArrayXXd amp(grid.size(), 1);
  for (int i = 0; i < grid.size(); ++i) amp(i, 0) = grid.node(i);
  CoefficientField f(freq, grid, {1}, amp);
  EnergySample e = energy(f);
  const double expected = 1.0 + std::pow(M_PI, 4) / 3.0;
  CHECK(e.membrane == doctest::Approx(1.0).epsilon(1e-12));  // exact on linear
  CHECK(e.total == doctest::Approx(expected).epsilon(2e-4));
  CHECK(e.total == e.membrane + e.bending);
  CHECK((grid.weights() * e.density).sum() == doctest::Approx(e.total).epsilon(1e-13));
}

TEST_CASE("constraint residual") {
  FrequencyGrid freq(1.0, 16);
  XGrid grid = XGrid::graded_unit(64, 2.0);

  auto zero = CoefficientField::zero(freq, grid);
  CHECK((constraint_residual(zero) + 2.0 * grid.nodes()).abs().maxCoeff() == 0.0);

  // a(x) = sqrt(2x)/k satisfies the constraint identically
  const double k = freq.wavenumber(2);
  ArrayXXd amp(grid.size(), 1);
  for (int i = 0; i < grid.size(); ++i) amp(i, 0) = std::sqrt(2 * grid.node(i)) / k;
  CoefficientField f(freq, grid, {2}, amp);
  CHECK(constraint_residual(f).abs().maxCoeff() < 1e-14);
}

TEST_CASE("combine: identity, doubling, subadditivity, residual algebra") {
  FrequencyGrid freq(2.0, 32);
  XGrid grid = XGrid::graded_unit(48, 2.0);
  auto f = random_field(freq, grid, {1, 3, 8}, 11);
  auto g = random_field(freq, grid, {2, 3, 9}, 12);
  auto zero = CoefficientField::zero(freq, grid);

  auto id = combine(f, zero);
  CHECK((id.amp() - f.amp()).abs().maxCoeff() < 1e-15);

  auto dbl = combine(f, f);
  CHECK((constraint_sum(dbl) - 2.0 * constraint_sum(f)).abs().maxCoeff() < 1e-12);

  // energy subadditivity and exact additivity of constraint sums
  for (unsigned seed = 1; seed <= 5; ++seed) {
    auto a = random_field(freq, grid, {1, 2, 5, 7}, seed);
    auto b = random_field(freq, grid, {2, 4, 5}, seed + 100);
    auto c = combine(a, b);
    CHECK(energy(c).total <= energy(a).total + energy(b).total + 1e-12);
    ArrayXd lhs = constraint_residual(c);
    ArrayXd rhs = constraint_residual(a) + constraint_residual(b) + 2.0 * grid.nodes();
    CHECK((lhs - rhs).abs().maxCoeff() < 1e-12);

    // energy nonnegative, bending dominated from below by the smallest mode
    EnergySample ec = energy(c);
    CHECK(ec.total >= 0.0);
    const double kmin = c.k(0);
    CHECK(ec.bending >= kmin * kmin * grid.quad(constraint_sum(c)) - 1e-12);
  }
}

TEST_CASE("odd symmetrization") {
  FrequencyGrid freq(1.0, 32);
  XGrid grid = XGrid::graded_unit(48, 2.0);

  // pure sine input is unchanged
  auto f = random_field(freq, grid, {1, 4}, 3);
  auto sym = symmetrize_odd(TwoSidedField::from_odd(f));
  CHECK((sym.amp() - f.amp()).abs().maxCoeff() < 1e-15);

  // pure cosine mode becomes the sine mode of the same amplitude and energy
  TwoSidedField cosf;
  cosf.freq = freq;
  cosf.grid = grid;
  cosf.cos_modes = {3};
  cosf.cos_amp.resize(grid.size(), 1);
  for (int i = 0; i < grid.size(); ++i) cosf.cos_amp(i, 0) = grid.node(i);
  cosf.sin_amp.resize(grid.size(), 0);
  auto folded = symmetrize_odd(cosf);
  REQUIRE(folded.modes() == std::vector<int>{3});
  CHECK((folded.amp().col(0) - cosf.cos_amp.col(0)).abs().maxCoeff() < 1e-15);
  CHECK(energy(folded).total == doctest::Approx(energy(cosf).total));

  // mixed random field: energy never grows, constraint sum preserved
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  TwoSidedField mixed;
  mixed.freq = freq;
  mixed.grid = grid;
  mixed.sin_modes = {1, 2, 6};
  mixed.cos_modes = {0, 2, 5};
  mixed.sin_amp.resize(grid.size(), 3);
  mixed.cos_amp.resize(grid.size(), 3);
  for (int i = 0; i < grid.size(); ++i) {
    for (int j = 0; j < 3; ++j) {
      mixed.sin_amp(i, j) = uni(rng) * grid.node(i);
      mixed.cos_amp(i, j) = uni(rng) * grid.node(i);
    }
  }
  auto out = symmetrize_odd(mixed);
  CHECK(energy(out).total <= energy(mixed).total + 1e-12);
  CHECK((constraint_sum(out) - constraint_sum(mixed)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("synthesis: spot value and Parseval") {
  FrequencyGrid freq(1.5, 64);
  XGrid grid = XGrid::graded_unit(32, 2.0);

  auto zero = CoefficientField::zero(freq, grid);
  CHECK(synthesize(zero, 8).u.abs().maxCoeff() == 0.0);

  auto f = random_field(freq, grid, {1, 2, 7, 40}, 5);
  CHECK_THROWS_AS(synthesize(f, 80), std::invalid_argument);  // aliasing guard

  FieldSamples s = synthesize(f, 2 * 40 + 1);
  // spot check u(x, y0) = sum a sin(k y0)
  const int iy = 13, ix = 20;
  double want = 0.0;
  for (int j = 0; j < f.n_modes(); ++j)
    want += f.amp()(ix, j) * std::sin(f.k(j) * s.y[iy]);
  CHECK(s.u(ix, iy) == doctest::Approx(want).epsilon(1e-12));

  // Parseval with the (1/L) pairing, exact on the unaliased grid
  const double dy = 2 * freq.half_period() / s.y.size();
  for (int i : {0, 10, 31}) {
    const double lhs = s.u.row(i).square().sum() * dy / freq.half_period();
    const double rhs = f.amp().row(i).square().sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("rescaling by alpha") {
  FrequencyGrid freq(1.0, 16);
  XGrid grid = XGrid::graded_unit(128, 2.0);
  ArrayXXd amp(grid.size(), 1);
  for (int i = 0; i < grid.size(); ++i) amp(i, 0) = grid.node(i);
  CoefficientField f(freq, grid, {1}, amp);

  auto same = rescale(f, 1.0);
  CHECK(same.freq().half_period() == 1.0);
  CHECK((same.amp() - f.amp()).abs().maxCoeff() == 0.0);

  // alpha = 2: k = pi -> pi/2 on L = 2, amplitude doubles,
  // membrane x4, bending x(1/4)
  auto v = rescale(f, 2.0);
  CHECK(v.freq().half_period() == 2.0);
  CHECK(v.k(0) == doctest::Approx(M_PI / 2));
  CHECK((v.amp() - 2.0 * f.amp()).abs().maxCoeff() < 1e-15);
  EnergySample e0 = energy(f), e1 = energy(v);
  CHECK(e1.membrane == doctest::Approx(4.0 * e0.membrane).epsilon(1e-12));
  CHECK(e1.bending == doctest::Approx(0.25 * e0.bending).epsilon(1e-12));
  CHECK((constraint_residual(v) - constraint_residual(f)).abs().maxCoeff() < 1e-13);

  CHECK_THROWS_AS(rescale(f, M_PI), std::invalid_argument);
  CHECK_THROWS_AS(rescale(f, 0.5), std::invalid_argument);
}

TEST_CASE("periodic extension") {
  FrequencyGrid freq(1.0, 16);
  XGrid grid = XGrid::graded_unit(96, 2.0);
  auto f = random_field(freq, grid, {1, 2, 5}, 9);

  auto same = extend_periodic(f, 1);
  CHECK(energy(same).total == doctest::Approx(energy(f).total).epsilon(1e-14));

  auto two = extend_periodic(f, 2);
  CHECK(two.freq().half_period() == 2.0);
  // wavenumbers unchanged: pi*2m/(2L) = pi*m/L
  for (int j = 0; j < f.n_modes(); ++j) CHECK(two.k(j) == doctest::Approx(f.k(j)));
  CHECK(energy(two).total == doctest::Approx(energy(f).total).epsilon(1e-12));
  CHECK((constraint_residual(two) - constraint_residual(f)).abs().maxCoeff() < 1e-13);

  CHECK_THROWS_AS(extend_periodic(f, 3, 8), std::invalid_argument);  // cap exceeded
}

TEST_CASE("amplitude invariants") {
  FrequencyGrid freq(1.0, 8);
  XGrid grid = XGrid::graded_unit(16, 2.0);
  ArrayXXd amp = ArrayXXd::Constant(grid.size(), 1, 0.5);
  amp(3, 0) = -5e-15;  // clamped
  CoefficientField f(freq, grid, {1}, amp);
  CHECK(f.amp()(3, 0) == 0.0);
  CHECK(f.amp()(0, 0) == 0.0);  // x = 0 column forced

  ArrayXXd bad = ArrayXXd::Constant(grid.size(), 1, 0.5);
  bad(3, 0) = -1e-3;
  CHECK_THROWS_AS(CoefficientField(freq, grid, {1}, bad), std::invalid_argument);
}
