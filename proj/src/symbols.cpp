#include "schatten/symbols.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "schatten/haar.hpp"

namespace schatten {

std::string kind_name(SymbolSpec::Kind kind) {
  switch (kind) {
    case SymbolSpec::Kind::gaussian_bump: return "gaussian-bump";
    case SymbolSpec::Kind::power: return "power";
    case SymbolSpec::Kind::sine_product: return "sine-product";
    case SymbolSpec::Kind::haar_random: return "haar-random";
    case SymbolSpec::Kind::constant: return "constant";
    case SymbolSpec::Kind::linear: return "linear";
  }
  return "";
}

SymbolSpec::Kind parse_symbol_kind(const std::string& text) {
  if (text == "gaussian-bump" || text == "gaussian") return SymbolSpec::Kind::gaussian_bump;
  if (text == "power") return SymbolSpec::Kind::power;
  if (text == "sine-product" || text == "sine") return SymbolSpec::Kind::sine_product;
  if (text == "haar-random") return SymbolSpec::Kind::haar_random;
  if (text == "constant") return SymbolSpec::Kind::constant;
  if (text == "linear") return SymbolSpec::Kind::linear;
  throw std::invalid_argument("unknown symbol kind: " + text);
}

SymbolSpec parse_symbol(const std::string& text, int dim) {
  const auto colon = text.find(':');
  SymbolSpec spec;
  spec.kind = parse_symbol_kind(text.substr(0, colon));
  spec.label = text;
  if (colon == std::string::npos) return spec;
  const std::string arg = text.substr(colon + 1);
  try {
    switch (spec.kind) {
      case SymbolSpec::Kind::power: spec.beta = std::stod(arg); break;
      case SymbolSpec::Kind::haar_random: spec.decay = std::stod(arg); break;
      case SymbolSpec::Kind::constant: spec.offset = std::stod(arg); break;
      case SymbolSpec::Kind::linear: spec.axis = std::stoi(arg); break;
      case SymbolSpec::Kind::gaussian_bump: spec.width = std::stod(arg); break;
      case SymbolSpec::Kind::sine_product: {
        std::stringstream ss(arg);
        std::string item;
        int i = 0;
        while (std::getline(ss, item, ',') && i < dim) spec.frequencies[i++] = std::stoi(item);
        break;
      }
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("bad symbol parameter: " + text);
  }
  return spec;
}

SampledFunction symbol_library(const SymbolSpec& spec, const GridWindow& win) {
  win.validate();
  const int n = win.dim;
  Point c{};
  for (int i = 0; i < n; ++i) c[i] = win.lower[i] + spec.center[i] * win.side;
  auto radius = [&](const Point& x) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += (x[i] - c[i]) * (x[i] - c[i]);
    return std::sqrt(r2);
  };
  switch (spec.kind) {
    case SymbolSpec::Kind::constant:
      return sample(win, [&](const Point&) { return spec.offset; });
    case SymbolSpec::Kind::gaussian_bump:
      if (!(spec.width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
      return sample(win, [&](const Point& x) {
        const double r = radius(x) / spec.width;
        return spec.offset + spec.amplitude * std::exp(-r * r);
      });
    case SymbolSpec::Kind::power:
      if (!(spec.beta > 0.0) || !(spec.radius > 0.0)) throw std::invalid_argument("power symbol needs beta > 0 and radius > 0");
      return sample(win, [&](const Point& x) {
        return spec.offset + spec.amplitude * std::pow(std::min(radius(x), spec.radius), spec.beta);
      });
    case SymbolSpec::Kind::sine_product:
      return sample(win, [&](const Point& x) {
        double v = spec.amplitude;
        for (int i = 0; i < n; ++i)
          v *= std::sin(2.0 * std::numbers::pi * spec.frequencies[i] * (x[i] - win.lower[i]) / win.side);
        return spec.offset + v;
      });
    case SymbolSpec::Kind::linear: {
      if (spec.axis < 1 || spec.axis > n) throw std::invalid_argument("linear symbol axis must lie in 1..n");
      const int a = spec.axis - 1;
      return sample(win, [&](const Point& x) { return spec.offset + spec.amplitude * (x[a] - c[a]); });
    }
    case SymbolSpec::Kind::haar_random: {
      if (spec.depth < 1) throw std::invalid_argument("haar-random depth must be positive");
      const int finest = win.k_min + spec.depth - 1;
      if (std::ldexp(1.0, -finest) < 2.0 * win.spacing())
        throw std::invalid_argument("haar-random depth is not resolved by the grid");
      std::mt19937_64 rng(spec.seed);
      HaarCoefficients coeffs;
      coeffs.window = win;
      coeffs.shift = Shift::zero(n);
      const auto sigs = cancellative_signatures(n);
      for (int k = win.k_min; k <= finest; ++k)
        for (const auto& q : interior_cubes_at(win, coeffs.shift, k))
          for (const auto& sig : sigs) {
            const double sign = (rng() >> 63) ? 1.0 : -1.0;
            coeffs.entries[{q, sig}] = spec.amplitude * sign * std::pow(q.volume(), 0.5 + spec.decay);
          }
      SampledFunction b = haar_synthesis(coeffs, false);
      b.values.array() += spec.offset;
      return b;
    }
  }
  throw std::invalid_argument("unknown symbol kind");
}

std::vector<SymbolSpec> default_symbol_family(int) {
  std::vector<SymbolSpec> fam;
  SymbolSpec g;
  g.kind = SymbolSpec::Kind::gaussian_bump;
  g.label = "gaussian-bump";
  fam.push_back(g);

  SymbolSpec s1;
  s1.kind = SymbolSpec::Kind::sine_product;
  s1.label = "sine-product";
  s1.frequencies = {2, 1, 1};
  fam.push_back(s1);

  SymbolSpec s2 = s1;
  s2.label = "sine-product-low";
  s2.frequencies = {1, 1, 1};
  fam.push_back(s2);

  SymbolSpec p;
  p.kind = SymbolSpec::Kind::power;
  p.label = "power-0.6";
  fam.push_back(p);

  SymbolSpec h;
  h.kind = SymbolSpec::Kind::haar_random;
  h.label = "haar-random-0.3";
  h.seed = 7;
  fam.push_back(h);

  SymbolSpec nc;
  nc.kind = SymbolSpec::Kind::gaussian_bump;
  nc.label = "near-constant";
  nc.offset = 1.0;
  nc.amplitude = 0.05;
  nc.width = 0.2;
  nc.center = {0.4, 0.6, 0.5};
  fam.push_back(nc);
  return fam;
}

}  // namespace schatten
