#pragma once

#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "schatten/dyadic_grid.hpp"
#include "schatten/sampled_function.hpp"
#include "schatten/weights.hpp"

namespace schatten {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct CubeSequence {
  std::map<CubeId, double> entries;
  std::string label = "custom";
};

struct LorentzParams {
  double p = 2.0;
  double q = kInf;
};

struct LorentzValue {
  double value = 0.0;
  /// 1-based index attaining the sup when q is infinite, 0 otherwise.
  std::size_t argmax_k = 0;
};

/// Rearranges |values| nonincreasingly; weights (1+k)^{q/p-1} with k from 1.
LorentzValue lorentz_functional(std::vector<double> values, const LorentzParams& params);
double lorentz_norm(const CubeSequence& seq, const LorentzParams& params);

/// Riemann double sum of |b(x)-b(y)|^p / |x-y|^{2n} over distinct samples, to the power 1/p.
double besov_continuous(const SampledFunction& b, double p);
/// Uses the window of b; a second window on the same lattice overrides the level range.
double besov_dyadic(const SampledFunction& b, double p, const Shift& shift);
double besov_dyadic(const SampledFunction& b, double p, const Shift& shift, const GridWindow& win);
double besov_dyadic_weighted(const SampledFunction& b, const Weight& w, double p, const Shift& shift,
                             const GridWindow& win);
/// Per-cube terms (sum over signatures of the p-th powers), weighted when w is given.
CubeSequence besov_terms(const SampledFunction& b, double p, const Shift& shift, const GridWindow& win,
                         const Weight* w = nullptr);

enum class GradientScheme { centered, spectral };

std::vector<SampledFunction> gradient(const SampledFunction& b, GradientScheme scheme = GradientScheme::centered);
/// (sum |grad b|_2^p h^n)^{1/p}; p_exponent 0 means p = n.
double sobolev_seminorm(const SampledFunction& b, int p_exponent = 0, GradientScheme scheme = GradientScheme::centered);

struct OscillationValue {
  double value = 0.0;
  /// Fraction of the dilate KQ lying outside the window.
  double clip_fraction = 0.0;
};

OscillationValue oscillation(const SampledFunction& b, const CubeId& q, double alpha, double K);
double mean_oscillation(const SampledFunction& b, const CubeId& q);
/// |Q|^{-1} sum over Q of |b - c| h^n.
double mean_deviation(const SampledFunction& b, const CubeId& q, double c);
CubeSequence oscillation_sequence(const SampledFunction& b, const GridWindow& win, double alpha, double K);
CubeSequence mean_oscillation_sequence(const SampledFunction& b, const GridWindow& win);

void write_cube_sequence_csv(const CubeSequence& seq, std::ostream& os);

}  // namespace schatten
