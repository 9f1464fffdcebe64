#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schatten/dyadic_grid.hpp"
#include "schatten/sampled_function.hpp"

namespace schatten {

struct SymbolSpec {
  enum class Kind { gaussian_bump, power, sine_product, haar_random, constant, linear };

  Kind kind = Kind::constant;
  std::string label;
  double amplitude = 1.0;
  double offset = 0.0;
  /// Gaussian: A exp(-|x-c|^2 / width^2).
  double width = 0.15;
  /// Relative to the window: 0.5 is the center.
  Point center{0.5, 0.5, 0.5};
  /// Power: A min(|x-c|, radius)^beta.
  double beta = 0.6;
  double radius = 0.3;
  /// Sine product: prod sin(2 pi f_i x_i).
  std::array<int, kMaxDim> frequencies{1, 1, 1};
  /// Linear: A (x_axis - c_axis), axis 1-based.
  int axis = 1;
  /// Haar-random: coefficients sign * |Q|^{1/2 + decay} on `depth` levels from k_min.
  double decay = 0.3;
  int depth = 4;
  std::uint64_t seed = 1;
};

std::string kind_name(SymbolSpec::Kind kind);
SymbolSpec::Kind parse_symbol_kind(const std::string& text);
/// Short form accepted by the CLI: gaussian, sine, sine:2,1, power:0.6, haar-random:0.3, constant:c, linear:axis.
SymbolSpec parse_symbol(const std::string& text, int dim);

SampledFunction symbol_library(const SymbolSpec& spec, const GridWindow& win);
/// Gaussian bump, two sine products, capped power, haar-random, near-constant bump.
std::vector<SymbolSpec> default_symbol_family(int dim);

}  // namespace schatten
