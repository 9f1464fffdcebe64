#include "schatten/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "schatten/csv.hpp"

namespace schatten {

namespace {

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("not a number: " + s);
  }
  if (used != s.size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

template <typename F>
void for_each_cube_range(const GridWindow& win, F&& f) {
  for (const auto& shift : all_shifts(win.dim))
    for (const auto& q : enumerate_cubes(win, shift)) {
      const SampleRange r = cube_samples(win, q);
      if (!r.empty()) f(q, r);
    }
}

}  // namespace

WeightSpec parse_weight_spec(const std::string& text) {
  WeightSpec spec;
  if (text.empty() || text == "1" || text == "none") return spec;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "constant") {
    spec.value = rest.empty() ? 1.0 : parse_number(rest);
    if (!(spec.value > 0.0)) throw std::invalid_argument("constant weight must be positive");
    return spec;
  }
  if (kind != "power" || rest.empty()) throw std::invalid_argument("unknown weight spec: " + text);
  spec.kind = WeightSpec::Kind::power;
  const auto at = rest.find('@');
  spec.alpha = parse_number(rest.substr(0, at));
  if (at != std::string::npos) {
    spec.centered = false;
    std::stringstream ss(rest.substr(at + 1));
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
      if (i >= kMaxDim) throw std::invalid_argument("too many center coordinates");
      spec.center[i++] = parse_number(item);
    }
  }
  return spec;
}

std::string to_string(const WeightSpec& spec, int dim) {
  switch (spec.kind) {
    case WeightSpec::Kind::constant:
      return "constant:" + format_g17(spec.value);
    case WeightSpec::Kind::tabulated:
      return "tabulated";
    case WeightSpec::Kind::power: {
      std::string s = "power:" + format_g17(spec.alpha);
      if (!spec.centered) {
        s += '@';
        for (int i = 0; i < dim; ++i) s += (i ? "," : "") + format_g17(spec.center[i]);
      }
      return s;
    }
  }
  return "";
}

Weight Weight::inverse() const {
  Weight out;
  out.w = w;
  out.w.values = w.values.cwiseInverse();
  out.spec = spec;
  switch (spec.kind) {
    case WeightSpec::Kind::constant:
      out.spec.value = 1.0 / spec.value;
      break;
    case WeightSpec::Kind::power:
      out.spec.alpha = -spec.alpha;
      break;
    case WeightSpec::Kind::tabulated:
      break;
  }
  out.clamp_value = clamp_value > 0.0 ? 1.0 / clamp_value : 0.0;
  return out;
}

Weight make_weight(const WeightSpec& spec, const GridWindow& win) {
  Weight out;
  out.spec = spec;
  switch (spec.kind) {
    case WeightSpec::Kind::constant:
      if (!(spec.value > 0.0)) throw std::invalid_argument("constant weight must be positive");
      out.w = SampledFunction(win);
      out.w.values.setConstant(spec.value);
      return out;
    case WeightSpec::Kind::power: {
      if (!(std::abs(spec.alpha) < win.dim)) throw std::invalid_argument("power weight exponent must lie in (-n, n)");
      Point c = spec.center;
      if (spec.centered)
        for (int i = 0; i < win.dim; ++i) c[i] = win.lower[i] + 0.5 * win.side;
      const double rmin = 0.5 * win.spacing();
      out.clamp_value = std::pow(rmin, spec.alpha);
      out.w = sample(win, [&](const Point& x) {
        double r2 = 0.0;
        for (int i = 0; i < win.dim; ++i) r2 += (x[i] - c[i]) * (x[i] - c[i]);
        return std::pow(std::max(std::sqrt(r2), rmin), spec.alpha);
      });
      return out;
    }
    case WeightSpec::Kind::tabulated:
      throw std::invalid_argument("tabulated weights need sample values");
  }
  return out;
}

Weight tabulated_weight(const SampledFunction& w) {
  if (!(w.values.size() > 0) || !(w.values.minCoeff() > 0.0) || !w.values.allFinite())
    throw std::invalid_argument("weight samples must be finite and positive");
  Weight out;
  out.w = w;
  out.spec.kind = WeightSpec::Kind::tabulated;
  return out;
}

double a2_constant(const Weight& w, const GridWindow& win) {
  if (!w.w.window.same_lattice(win)) throw GridError("weight sampled on a different grid");
  if (!(w.w.values.minCoeff() > 0.0)) throw std::invalid_argument("weight has nonpositive samples");
  double best = 1.0;
  for_each_cube_range(win, [&](const CubeId&, const SampleRange& r) {
    double s = 0.0, si = 0.0;
    for_each_sample(win, r, [&](std::size_t k) {
      const double v = w.w.values[static_cast<Eigen::Index>(k)];
      s += v;
      si += 1.0 / v;
    });
    const double cnt = static_cast<double>(r.count());
    best = std::max(best, (s / cnt) * (si / cnt));
  });
  return best;
}

double weighted_measure(const Weight& w, const CubeId& q) {
  double s = 0.0;
  for_each_sample(w.w.window, cube_samples(w.w.window, q), [&](std::size_t k) { s += w.w.values[static_cast<Eigen::Index>(k)]; });
  return s * w.w.window.cell_volume();
}

double reverse_holder_constant(const Weight& w, const GridWindow& win, double sigma) {
  double best = 1.0;
  for_each_cube_range(win, [&](const CubeId&, const SampleRange& r) {
    double s = 0.0, sp = 0.0;
    for_each_sample(win, r, [&](std::size_t k) {
      const double v = w.w.values[static_cast<Eigen::Index>(k)];
      s += v;
      sp += std::pow(v, 1.0 + sigma);
    });
    const double cnt = static_cast<double>(r.count());
    best = std::max(best, std::pow(sp / cnt, 1.0 / (1.0 + sigma)) / (s / cnt));
  });
  return best;
}

std::vector<double> default_sigma_ladder() {
  std::vector<double> out;
  for (int e = -6; e <= 0; ++e) out.push_back(std::ldexp(1.0, e));
  return out;
}

ReverseHolderResult reverse_holder_index(const Weight& w, const GridWindow& win, const std::vector<double>& candidates,
                                         double max_constant) {
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (!(candidates[i] > 0.0) || (i && candidates[i] <= candidates[i - 1]))
      throw std::invalid_argument("sigma candidates must be positive and ascending");
  ReverseHolderResult res;
  for (double s : candidates) {
    const double c = reverse_holder_constant(w, win, s);
    res.table.emplace_back(s, c);
    if (c <= max_constant) {
      res.sigma = s;
      res.constant = c;
    }
  }
  return res;
}

double doubling_ratio(const Weight& w, double lambda, const GridWindow& win) {
  if (!(lambda >= 1.0)) throw std::invalid_argument("dilation factor must be at least 1");
  const Box dom = win.domain();
  const double scale = std::pow(lambda, 2 * win.dim);
  double best = 0.0;
  bool any = false;
  for (const auto& q : interior_cubes(win, Shift::zero(win.dim))) {
    const Box big = cube_geometry(q).dilate(lambda);
    if (!dom.contains(big)) continue;
    double wb = 0.0;
    for_each_sample(win, box_samples(win, big), [&](std::size_t k) { wb += w.w.values[static_cast<Eigen::Index>(k)]; });
    wb *= win.cell_volume();
    best = std::max(best, wb / (scale * weighted_measure(w, q)));
    any = true;
  }
  if (!any) throw GridError("no cube has its dilate inside the window");
  return best;
}

}  // namespace schatten
