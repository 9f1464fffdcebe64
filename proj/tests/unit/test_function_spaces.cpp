#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "schatten/function_spaces.hpp"
#include "schatten/haar.hpp"
#include "schatten/symbols.hpp"

using namespace schatten;

namespace {

SampledFunction bump(const GridWindow& win) {
  return sample(win, [&](const Point& x) {
    double r2 = 0.0;
    for (int i = 0; i < win.dim; ++i) r2 += (x[i] - 0.5) * (x[i] - 0.5);
    return std::exp(-r2 / 0.02);
  });
}

Weight power_weight(double alpha, const GridWindow& win) {
  WeightSpec s;
  s.kind = WeightSpec::Kind::power;
  s.alpha = alpha;
  return make_weight(s, win);
}

}  // namespace

TEST(Lorentz, Examples) {
  EXPECT_EQ(lorentz_functional({}, {2.0, kInf}).value, 0.0);
  std::vector<double> harmonic;
  for (int k = 1; k <= 100; ++k) harmonic.push_back(1.0 / k);
  const LorentzValue v = lorentz_functional(harmonic, {1.0, kInf});
  EXPECT_DOUBLE_EQ(v.value, 2.0);
  EXPECT_EQ(v.argmax_k, 1u);

  const std::vector<double> a{0.3, -2.0, 1.0, 0.5};
  for (double p : {1.0, 2.0, 3.5}) {
    double lp = 0.0;
    for (double x : a) lp += std::pow(std::abs(x), p);
    EXPECT_NEAR(lorentz_functional(a, {p, p}).value, std::pow(lp, 1.0 / p), 1e-14);
  }
}

TEST(Lorentz, NormOfSequenceRearranges) {
  CubeSequence s;
  s.entries[CubeId{Shift::zero(1), 1, {0}}] = 0.25;
  s.entries[CubeId{Shift::zero(1), 1, {1}}] = 1.0;
  EXPECT_DOUBLE_EQ(lorentz_norm(s, {1.0, kInf}), 2.0);
}

TEST(Besov, ContinuousBasics) {
  const GridWindow win = GridWindow::unit(2, 16);
  EXPECT_EQ(besov_continuous(sample(win, [](const Point&) { return 4.0; }), 4.0), 0.0);
  const SampledFunction b = bump(win);
  SampledFunction b3(win, -3.0 * b.values);
  EXPECT_NEAR(besov_continuous(b3, 4.0), 3.0 * besov_continuous(b, 4.0), 1e-12 * besov_continuous(b3, 4.0));
}

TEST(Besov, ContinuousQuadratureStability) {
  const double coarse = besov_continuous(bump(GridWindow::unit(1, 128)), 4.0);
  const double fine = besov_continuous(bump(GridWindow::unit(1, 256)), 4.0);
  EXPECT_LT(std::max(coarse, fine) / std::min(coarse, fine), 1.25);
}

TEST(Besov, DyadicExamples) {
  const GridWindow win = GridWindow::unit(2, 16);
  EXPECT_EQ(besov_dyadic(sample(win, [](const Point&) { return 1.0; }), 4.0, Shift::zero(2)), 0.0);
  const HaarIndex idx{CubeId{Shift::zero(2), 2, {1, 2}}, Signature{2, 1}};
  const SampledFunction h = haar_function(idx, win);
  EXPECT_NEAR(besov_dyadic(h, 4.0, Shift::zero(2)), 1.0 / std::sqrt(idx.cube.volume()), 1e-12);
  EXPECT_NEAR(besov_dyadic(h, 1.5, Shift::zero(2)), 1.0 / std::sqrt(idx.cube.volume()), 1e-12);
}

TEST(Besov, WeightedAgreesWithUnweightedForUnitWeight) {
  const GridWindow win = GridWindow::unit(2, 16);
  const SampledFunction b = bump(win);
  const Weight one = make_weight(WeightSpec{}, win);
  for (const auto& s : all_shifts(2)) EXPECT_DOUBLE_EQ(besov_dyadic_weighted(b, one, 4.0, s, win), besov_dyadic(b, 4.0, s));
}

TEST(Besov, WeightedTermsAreComparable) {
  const GridWindow win = GridWindow::unit(2, 16);
  const SampledFunction b = bump(win);
  const Weight w = power_weight(0.5, win);
  const double p = 4.0;
  const double a2 = a2_constant(w, win);
  const CubeSequence plain = besov_terms(b, p, Shift::zero(2), win);
  const CubeSequence weighted = besov_terms(b, p, Shift::zero(2), win, &w);
  ASSERT_EQ(plain.entries.size(), weighted.entries.size());
  for (const auto& [q, t] : plain.entries) {
    if (t == 0.0) continue;
    const double r = weighted.entries.at(q) / t;
    EXPECT_LE(r, 1.0 + 1e-12);
    EXPECT_GE(r, std::pow(a2, -p / 2.0) * (1.0 - 1e-12));
  }
}

TEST(Sobolev, Examples) {
  EXPECT_EQ(sobolev_seminorm(sample(GridWindow::unit(2, 16), [](const Point&) { return 1.0; })), 0.0);
  const SampledFunction x = sample(GridWindow::unit(1, 64), [](const Point& p) { return p[0]; });
  EXPECT_NEAR(sobolev_seminorm(x), 1.0, 1e-12);
}

TEST(Sobolev, GaussianBumpClosedForm) {
  const GridWindow win = GridWindow::unit(2, 256);
  SymbolSpec g = default_symbol_family(2).front();
  ASSERT_EQ(g.label, "gaussian-bump");
  const SampledFunction b = symbol_library(g, win);
  // The integral of |grad(A exp(-|x|^2/s^2))|^2 over the plane is pi A^2 for every s.
  const double exact = std::abs(g.amplitude) * std::sqrt(std::numbers::pi);
  EXPECT_NEAR(sobolev_seminorm(b) / exact, 1.0, 0.02);
  EXPECT_NEAR(sobolev_seminorm(b, 0, GradientScheme::spectral) / exact, 1.0, 0.02);
}

TEST(Oscillation, Examples) {
  const GridWindow win = GridWindow::unit(2, 32);
  const SampledFunction c = sample(win, [](const Point&) { return 2.0; });
  const CubeId q{Shift::zero(2), 2, {1, 1}};
  EXPECT_EQ(oscillation(c, q, 1.0, 5.0).value, 0.0);
  EXPECT_EQ(mean_oscillation(c, q), 0.0);

  const SampledFunction b = bump(win);
  EXPECT_NEAR(oscillation(b, q, 1.0, 1.0).value, mean_oscillation(b, q), 1e-14);
  double previous = 0.0;
  for (double K : {1.0, 2.0, 3.0, 5.0}) {
    const OscillationValue o = oscillation(b, q, 1.0, K);
    EXPECT_GE(o.value, previous - 1e-14);
    previous = o.value;
  }
  EXPECT_GT(oscillation(b, CubeId{Shift::zero(2), 2, {0, 0}}, 1.0, 5.0).clip_fraction, 0.0);
}

TEST(Oscillation, MeanOscillationOfIdentity) {
  const GridWindow win = GridWindow::unit(1, 64);
  const SampledFunction x = sample(win, [](const Point& p) { return p[0]; });
  EXPECT_NEAR(mean_oscillation(x, CubeId{Shift::zero(1), 0, {0}}), 0.25, 1e-12);
}

TEST(Oscillation, MedianComparison) {
  const GridWindow win = GridWindow::unit(2, 16);
  const SampledFunction b = bump(win);
  for (const auto& q : interior_cubes(win, Shift::zero(2))) {
    double best = 1e300;
    for (int i = 0; i <= 400; ++i) best = std::min(best, mean_deviation(b, q, i / 400.0));
    EXPECT_LE(mean_oscillation(b, q), 2.0 * best + 1e-12);
  }
}

TEST(Oscillation, SequencesCoverInteriorCubes) {
  const GridWindow win = GridWindow::unit(2, 16);
  const SampledFunction b = bump(win);
  EXPECT_EQ(oscillation_sequence(b, win, 1.0, 5.0).entries.size(), interior_cubes(win, Shift::zero(2)).size());
  EXPECT_EQ(mean_oscillation_sequence(b, win).label, "mean-osc");
}
