#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "schatten/dyadic_grid.hpp"
#include "schatten/haar.hpp"
#include "schatten/sampled_function.hpp"
#include "schatten/weights.hpp"

namespace schatten {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Dense operator on grid samples; singular values are taken under the
/// ip_weight inner product when one is attached.
template <typename Scalar>
struct OperatorMatrix {
  DenseMatrix<Scalar> entries;
  GridWindow window;
  std::string mode;
  std::optional<Weight> ip_weight;

  Eigen::Index size() const { return entries.rows(); }
};

using RealOperator = OperatorMatrix<double>;
using ComplexOperator = OperatorMatrix<std::complex<double>>;

enum class RieszMode { periodic_multiplier, truncated_kernel };

std::string to_string(RieszMode mode);
RieszMode parse_riesz_mode(const std::string& text);

/// Gamma((n+1)/2) / pi^{(n+1)/2}.
double riesz_constant(int n);
double riesz_kernel(int j, const Point& z, int n);
/// Fraction of the Nyquist frequency, in max-norm, beyond which the periodic multiplier is tapered.
inline constexpr double kRieszTaperStart = 0.5;

/// -i xi_j/|xi| on integer frequencies, times a cos^2 taper in t = 2 max_i|xi_i|/samples that is 1 for
/// t <= kRieszTaperStart and vanishes at t = 1. Zero at the origin and on the Nyquist shell.
std::complex<double> riesz_symbol(int j, const std::array<int, kMaxDim>& freq, int samples, int n);
RealOperator riesz_matrix(int j, const GridWindow& win, RieszMode mode);

template <typename Scalar>
OperatorMatrix<Scalar> commutator(const SampledFunction& b, const OperatorMatrix<Scalar>& T) {
  if (b.size() != T.size() || T.entries.rows() != T.entries.cols())
    throw std::invalid_argument("commutator: size mismatch");
  OperatorMatrix<Scalar> out = T;
  out.mode = "commutator(" + T.mode + ")";
  const Eigen::Index M = T.size();
  for (Eigen::Index y = 0; y < M; ++y)
    for (Eigen::Index x = 0; x < M; ++x) out.entries(x, y) = (b.values[x] - b.values[y]) * T.entries(x, y);
  return out;
}

/// diag(w^{1/2}) T diag(w^{-1/2}); the result carries no inner-product weight.
template <typename Scalar>
OperatorMatrix<Scalar> conjugate_by_weight(const OperatorMatrix<Scalar>& T, const Weight& w) {
  if (w.w.size() != T.size()) throw std::invalid_argument("conjugate_by_weight: size mismatch");
  if (!(w.w.values.minCoeff() > 0.0)) throw std::invalid_argument("conjugate_by_weight: nonpositive weight");
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Vec s = w.w.values.cwiseSqrt().template cast<Scalar>();
  const Vec si = w.w.values.cwiseSqrt().cwiseInverse().template cast<Scalar>();
  OperatorMatrix<Scalar> out;
  out.window = T.window;
  out.mode = T.mode;
  out.entries = s.asDiagonal() * T.entries * si.asDiagonal();
  return out;
}

struct ShiftMap {
  std::function<CubeId(const CubeId&)> cube_map;
  /// nullopt drops the term.
  std::function<std::optional<Signature>(const Signature&)> sig_map;

  /// sigma(Q) = first child in lexicographic offset order, identity on signatures.
  static ShiftMap first_child();
};

/// Standard-grid cancellative Haar functions of the window with their sample supports.
struct HaarBasis {
  std::vector<HaarIndex> indices;
  std::vector<std::vector<std::pair<Eigen::Index, double>>> support;
};

HaarBasis haar_basis(const GridWindow& win);

RealOperator dyadic_shift(const GridWindow& win, const ShiftMap& sm);

struct Paraproducts {
  RealOperator pi;
  RealOperator pi_star;
  RealOperator gamma;
  bool gamma_vanishes = false;
};

Paraproducts paraproducts(const SampledFunction& b, const GridWindow& win);
/// f -> Pi_f b, i.e. sum <f,h> <b>_Q h.
RealOperator average_paraproduct(const SampledFunction& b, const GridWindow& win);
/// Closed form sum <f,h^e_Q> (sum_eta <b,h^eta_Q> h^eta_Q(sigma Q)) h^{sigma e}_{sigma Q}.
RealOperator remainder_operator(const SampledFunction& b, const ShiftMap& sm, const GridWindow& win);
/// Pi_{Sh f} b - Sh(Pi_f b) assembled columnwise.
RealOperator remainder_by_definition(const SampledFunction& b, const ShiftMap& sm, const GridWindow& win);

struct KernelExpansion {
  int dim = 1;
  int l_max = 0;
  int quadrature = 0;
  /// c_l for l in [-L, L]^{2n}, first axis fastest; x axes precede y axes.
  std::vector<std::complex<double>> coefficients;
  double cube_volume = 1.0;
  double decay_exponent = 0.0;
  double reconstruction_residual = 0.0;

  std::complex<double> coefficient(std::span<const int> ell) const;
  /// |Q| c_l.
  std::complex<double> lambda(std::span<const int> ell) const { return cube_volume * coefficient(ell); }
};

/// quadrature 0 picks a per-dimension default.
KernelExpansion kernel_fourier_expansion(const WhitneyPair& pair, int j, int l_max, int quadrature = 0);

struct NecessityResult {
  RealOperator L;
  CubeId far;
  double median = 0.0;
  /// Trace of w^{1/2}[b,R_j] L w^{-1/2} as a matrix product.
  double trace_matrix = 0.0;
  /// |Q|^{-2} sum over Q x far of (b(x)-b(y)) eps(x) h^{2n}.
  double trace_closed_form = 0.0;
  /// |Q|^{-1} int_Q |b - <b>_far|.
  double far_mean_deviation = 0.0;
};

double lower_median(const SampledFunction& b, const CubeId& q);
NecessityResult necessity_test_operator(const SampledFunction& b, const CubeId& q, int j, const Weight& w);
/// Reuses a kernel-mode Riesz matrix of the window.
NecessityResult necessity_test_operator(const SampledFunction& b, const CubeId& q, int j, const Weight& w,
                                        const RealOperator& riesz_kernel_matrix);

struct GammaSet {
  int n = 1;
  int N = 1;
  std::vector<Eigen::MatrixXcd> gamma;

  double anticommutation_residual() const;
};

GammaSet make_gamma_set(int n);

/// i[sgn D, 1 (x) M_f] with sgn D = sum gamma_j (x) i R_j, using periodic Riesz matrices.
ComplexOperator quantised_derivative(const SampledFunction& f, const GridWindow& win, const GammaSet& gammas,
                                     const Weight* w = nullptr);

/// Off-diagonal blocks for the Pauli choice in two dimensions.
struct QuantisedBlocks {
  DenseMatrix<std::complex<double>> upper;
  DenseMatrix<std::complex<double>> lower;
};

QuantisedBlocks quantised_derivative_blocks(const SampledFunction& f, const GridWindow& win, const Weight* w = nullptr);

}  // namespace schatten
