#pragma once

#include <string>
#include <vector>

#include "schatten/dyadic_grid.hpp"
#include "schatten/sampled_function.hpp"

namespace schatten {

struct WeightSpec {
  enum class Kind { constant, power, tabulated };
  Kind kind = Kind::constant;
  double value = 1.0;
  double alpha = 0.0;
  Point center{};
  /// Use the window center instead of `center`.
  bool centered = true;
};

/// Accepts "1", "none", "constant:c", "power:alpha" and "power:alpha@x,y,...".
WeightSpec parse_weight_spec(const std::string& text);
std::string to_string(const WeightSpec& spec, int dim);

struct Weight {
  SampledFunction w;
  WeightSpec spec;
  /// Power weights: lower bound imposed at the center, 0 otherwise.
  double clamp_value = 0.0;

  Weight inverse() const;
};

Weight make_weight(const WeightSpec& spec, const GridWindow& win);
Weight tabulated_weight(const SampledFunction& w);

/// Max over cubes of all shifted systems meeting the window of avg(w) avg(1/w).
double a2_constant(const Weight& w, const GridWindow& win);
double weighted_measure(const Weight& w, const CubeId& q);

struct ReverseHolderResult {
  double sigma = 0.0;
  double constant = 1.0;
  std::vector<std::pair<double, double>> table;
};

double reverse_holder_constant(const Weight& w, const GridWindow& win, double sigma);
/// Largest candidate sigma with constant <= max_constant.
ReverseHolderResult reverse_holder_index(const Weight& w, const GridWindow& win, const std::vector<double>& candidates,
                                         double max_constant = 2.0);
std::vector<double> default_sigma_ladder();

double doubling_ratio(const Weight& w, double lambda, const GridWindow& win);

}  // namespace schatten
