#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "schatten/dyadic_grid.hpp"
#include "schatten/sampled_function.hpp"

namespace schatten {

/// Bit i holds epsilon_{i+1}; all ones is the non-cancellative signature.
struct Signature {
  int dim = 1;
  unsigned bits = 0;

  bool cancellative() const { return bits != (1u << dim) - 1u; }
  int eps(int axis) const { return static_cast<int>((bits >> axis) & 1u); }

  auto operator<=>(const Signature&) const = default;
};

std::vector<Signature> cancellative_signatures(int dim);
std::string to_string(const Signature& s);

struct HaarIndex {
  CubeId cube;
  Signature sig;

  auto operator<=>(const HaarIndex&) const = default;
};

enum class TransformPath { pyramid, direct };

struct HaarCoefficients {
  GridWindow window;
  Shift shift;
  std::map<HaarIndex, double> entries;
  /// Averages on the coarsest cubes; the truncated tail of the telescoping series.
  std::map<CubeId, double> coarse_averages;
  TransformPath path = TransformPath::direct;
  /// ||b||^2 minus the energy captured by coefficients and coarse averages.
  double residual_energy = 0.0;
};

/// Value of h^eps_Q on the child with position bits `child`.
double haar_child_value(const Signature& sig, unsigned child, double cube_volume);

SampledFunction haar_function(const HaarIndex& idx, const GridWindow& win);
double haar_coefficient(const SampledFunction& b, const HaarIndex& idx);
HaarCoefficients haar_transform(const SampledFunction& b, const Shift& shift);
/// Pyramid applies to the zero shift on windows whose coarsest cubes tile the domain.
bool pyramid_applicable(const GridWindow& win, const Shift& shift);

double cube_average(const SampledFunction& b, const CubeId& q);
/// Average on q rebuilt from the coarse averages and coarser coefficients.
double average_from_coarser(const HaarCoefficients& coeffs, const CubeId& q);

/// Coefficients of (b - <b>_Q) chi_Q on cubes R inside Q down to the finest window level.
HaarCoefficients expand_mean_oscillation(const SampledFunction& b, const CubeId& q);
SampledFunction haar_synthesis(const HaarCoefficients& coeffs, bool include_coarse);

using CubeFamily = std::map<CubeId, SampledFunction>;
SampledFunction nwo_maximal(const SampledFunction& f, const CubeFamily& family);

void write_haar_csv(const HaarCoefficients& coeffs, std::ostream& os);

}  // namespace schatten
