#include <gtest/gtest.h>

#include <random>

#include "schatten/spectra.hpp"

using namespace schatten;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  return Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return g(rng); });
}

SingularSpectrum spectrum(std::vector<double> v) {
  SingularSpectrum s;
  s.values = std::move(v);
  s.source_dim = s.values.size();
  return s;
}

}  // namespace

TEST(SingularValues, ZeroAndDiagonal) {
  const SingularSpectrum z = singular_values(Eigen::MatrixXd(Eigen::MatrixXd::Zero(5, 5)));
  for (double v : z.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(z.numerical_rank, 0u);
  const SingularSpectrum d = singular_values(Eigen::MatrixXd(Eigen::Vector3d(3, 1, 2).asDiagonal()));
  ASSERT_EQ(d.values.size(), 3u);
  EXPECT_NEAR(d.values[0], 3.0, 1e-15);
  EXPECT_NEAR(d.values[1], 2.0, 1e-15);
  EXPECT_NEAR(d.values[2], 1.0, 1e-15);
  EXPECT_EQ(d.numerical_rank, 3u);
}

TEST(SingularValues, EigenOracle) {
  const Eigen::MatrixXd T = random_matrix(50, 50, 1);
  const SingularSpectrum s = singular_values(T);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.transpose() * T, Eigen::EigenvaluesOnly);
  for (int k = 0; k < 50; ++k) EXPECT_NEAR(s.values[k], std::sqrt(std::max(0.0, es.eigenvalues()[49 - k])), 1e-10 * s.values[0]);
}

TEST(SingularValues, ComplexUnitaryInvariance) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  const Eigen::MatrixXcd A = Eigen::MatrixXcd::NullaryExpr(30, 30, [&] { return std::complex<double>(g(rng), g(rng)); });
  const Eigen::MatrixXcd U = Eigen::HouseholderQR<Eigen::MatrixXcd>(
                                 Eigen::MatrixXcd::NullaryExpr(30, 30, [&] { return std::complex<double>(g(rng), g(rng)); }))
                                 .householderQ();
  const SingularSpectrum a = singular_values(A), b = singular_values(Eigen::MatrixXcd(U * A * U.adjoint()));
  for (int k = 0; k < 30; ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-12 * a.values[0]);
}

TEST(SingularValues, RejectsNonFinite) {
  RealOperator T;
  T.entries = Eigen::MatrixXd::Identity(3, 3);
  T.entries(1, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(singular_values(T), std::invalid_argument);
}

TEST(SingularValues, TinyValuesTruncated) {
  const SingularSpectrum s = singular_values(Eigen::MatrixXd(Eigen::Vector3d(1.0, 1e-15, 0.5).asDiagonal()));
  EXPECT_EQ(s.values[2], 0.0);
  EXPECT_EQ(s.numerical_rank, 2u);
}

TEST(SchattenNorm, Examples) {
  EXPECT_DOUBLE_EQ(schatten_norm(spectrum({1.0, 0.5, 0.25}), 1.0, 1.0), 1.75);
  std::vector<double> h;
  for (int k = 1; k <= 100; ++k) h.push_back(1.0 / k);
  const SchattenValue v = schatten_functional(spectrum(h), 1.0, kInf);
  EXPECT_DOUBLE_EQ(v.value, 2.0);
  EXPECT_EQ(v.argmax_k, 1u);
  const SingularSpectrum s = spectrum({2.0, 1.0, 0.3});
  for (double p : {1.0, 2.0, 4.0})
    EXPECT_NEAR(schatten_norm(s, p, p), std::pow(std::pow(2.0, p) + 1.0 + std::pow(0.3, p), 1.0 / p), 1e-14);
}

TEST(SchattenNorm, LorentzHomogeneousAndMonotone) {
  std::vector<double> v;
  for (int k = 1; k <= 200; ++k) v.push_back(std::pow(k, -0.7));
  std::vector<double> scaled = v, bigger = v;
  for (double& x : scaled) x *= 3.0;
  bigger[50] = bigger[10];
  for (double q : {2.0, 4.0, kInf}) {
    const double base = schatten_norm(spectrum(v), 2.0, q);
    EXPECT_NEAR(schatten_norm(spectrum(scaled), 2.0, q), 3.0 * base, 1e-12 * base);
    EXPECT_GE(schatten_norm(spectrum(bigger), 2.0, q), base);
  }
}

TEST(MergeSpectra, UnionWithMultiplicity) {
  const SingularSpectrum m = merge_spectra(spectrum({3.0, 1.0}), spectrum({2.0, 1.0, 0.0}));
  EXPECT_EQ(m.values, (std::vector<double>{3.0, 2.0, 1.0, 1.0, 0.0}));
  EXPECT_EQ(m.source_dim, 5u);
}

TEST(OperatorNorm, MatchesLargestSingularValue) {
  const Eigen::MatrixXd T = random_matrix(40, 40, 3);
  EXPECT_NEAR(operator_norm(T), singular_values(T).values[0], 1e-8 * singular_values(T).values[0]);
}

TEST(RsFunctionals, LowerBoundedBySchattenNorm) {
  const GridWindow win = GridWindow::unit(1, 16);
  RealOperator T;
  T.window = win;
  T.entries = Eigen::MatrixXd::Zero(16, 16);
  CubeFamily fam;
  for (int k = 0; k <= win.k_max; ++k)
    for (const auto& q : interior_cubes_at(win, Shift::zero(1), k))
      fam.emplace(q, haar_function({q, Signature{1, 0}}, win));
  EXPECT_EQ(rs_lower_functional(T, fam, fam, 2.0).value, 0.0);

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    T.entries = random_matrix(16, 16, seed);
    const double lower = rs_lower_functional(T, fam, fam, 2.0).value;
    const double S2 = schatten_norm(singular_values(T.entries), 2.0, 2.0);
    // Haar families are orthonormal, so the functional is dominated by the Hilbert-Schmidt norm.
    EXPECT_LE(lower, S2 * (1 + 1e-12));
  }
  const RsLowerResult r = rs_lower_functional(T, fam, fam, 2.0);
  EXPECT_NEAR(r.e_size, 1.0, 1e-12);
}

TEST(RsFunctionals, NwoSizeOfNormalizedIndicator) {
  const GridWindow win = GridWindow::unit(1, 16);
  const CubeId q{Shift::zero(1), 2, {1}};
  SampledFunction e(win);
  for_each_sample(win, cube_samples(win, q), [&](std::size_t i) { e.values[i] = 1.0 / std::sqrt(q.volume()); });
  EXPECT_NEAR(nwo_size(e, q, 4.0), 1.0, 1e-12);
}

TEST(RsFunctionals, UpperAssembly) {
  const GridWindow win = GridWindow::unit(1, 8);
  SampledFunction e(win);
  e.values.setConstant(1.0);
  const RsUpperResult one = rs_upper_assembly({RsTerm{1.0, e, e}}, 2.0, 2.0);
  EXPECT_NEAR(one.ratio, 1.0, 1e-12);

  std::vector<RsTerm> terms;
  const std::vector<double> lambda{0.5, -2.0, 1.25};
  int i = 0;
  for (const auto& q : interior_cubes_at(win, Shift::zero(1), 2)) {
    if (i == 3) break;
    const SampledFunction h = haar_function({q, Signature{1, 0}}, win);
    terms.push_back({lambda[i++], h, h});
  }
  const RsUpperResult r = rs_upper_assembly(terms, 2.0, 2.0);
  EXPECT_LE(r.ratio, 1.0 + 1e-12);
  EXPECT_NEAR(r.schatten, std::sqrt(0.25 + 4.0 + 1.5625), 1e-12);
}
