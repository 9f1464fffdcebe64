#include "schatten/haar.hpp"

#include <cmath>

#include "schatten/csv.hpp"

namespace schatten {

namespace {

void require_resolvable(const GridWindow& win, const CubeId& q) {
  if (q.side() < 2.0 * win.spacing() * (1.0 - 1e-12))
    throw GridError("cube " + to_string(q) + " is not resolved by the sample grid");
}

template <typename F>
void for_each_child_range(const GridWindow& win, const CubeId& q, F&& f) {
  for (const auto& c : children(q)) f(child_position(c), cube_samples(win, c));
}

std::vector<CubeId> descendants_at(const CubeId& q, int level) {
  std::vector<CubeId> cur{q};
  for (int k = q.level; k < level; ++k) {
    std::vector<CubeId> next;
    for (const auto& c : cur)
      for (const auto& ch : children(c)) next.push_back(ch);
    cur.swap(next);
  }
  return cur;
}

void finish_residual(HaarCoefficients& out, const SampledFunction& b) {
  double captured = 0.0;
  for (const auto& [idx, c] : out.entries) captured += c * c;
  for (const auto& [q, avg] : out.coarse_averages) captured += avg * avg * q.volume();
  out.residual_energy = b.values.squaredNorm() * b.window.cell_volume() - captured;
}

}  // namespace

std::vector<Signature> cancellative_signatures(int dim) {
  std::vector<Signature> out;
  for (unsigned bits = 0; bits + 1 < (1u << dim); ++bits) out.push_back({dim, bits});
  return out;
}

std::string to_string(const Signature& s) {
  std::string out;
  for (int i = 0; i < s.dim; ++i) out += s.eps(i) ? '1' : '0';
  return out;
}

double haar_child_value(const Signature& sig, unsigned child, double cube_volume) {
  double sign = 1.0;
  for (int i = 0; i < sig.dim; ++i)
    if (sig.eps(i) == 0 && ((child >> i) & 1u)) sign = -sign;
  return sign / std::sqrt(cube_volume);
}

SampledFunction haar_function(const HaarIndex& idx, const GridWindow& win) {
  require_resolvable(win, idx.cube);
  SampledFunction out(win);
  const double vol = idx.cube.volume();
  for_each_child_range(win, idx.cube, [&](unsigned pos, const SampleRange& r) {
    const double v = haar_child_value(idx.sig, pos, vol);
    for_each_sample(win, r, [&](std::size_t k) { out.values[static_cast<Eigen::Index>(k)] = v; });
  });
  return out;
}

double haar_coefficient(const SampledFunction& b, const HaarIndex& idx) {
  const GridWindow& win = b.window;
  if (idx.cube.dim() != win.dim) throw GridError("Haar index dimension does not match samples");
  require_resolvable(win, idx.cube);
  const double vol = idx.cube.volume();
  double sum = 0.0;
  for_each_child_range(win, idx.cube, [&](unsigned pos, const SampleRange& r) {
    const double v = haar_child_value(idx.sig, pos, vol);
    double part = 0.0;
    for_each_sample(win, r, [&](std::size_t k) { part += b.values[static_cast<Eigen::Index>(k)]; });
    sum += v * part;
  });
  return sum * win.cell_volume();
}

bool pyramid_applicable(const GridWindow& win, const Shift& shift) {
  if (!shift.is_zero()) return false;
  const double coarse = std::ldexp(1.0, win.k_min);
  const double cells = std::ldexp(1.0, -(win.k_max + 1)) / win.spacing();
  if (cells < 1.0 || cells != std::floor(cells)) return false;
  if (win.side * coarse != std::floor(win.side * coarse)) return false;
  for (int i = 0; i < win.dim; ++i)
    if (win.lower[i] * coarse != std::floor(win.lower[i] * coarse)) return false;
  return true;
}

namespace {

HaarCoefficients pyramid(const SampledFunction& b) {
  const GridWindow& win = b.window;
  const int n = win.dim;
  HaarCoefficients out;
  out.window = win;
  out.shift = Shift::zero(n);
  out.path = TransformPath::pyramid;

  const int fine = win.k_max + 1;
  auto cells_at = [&](int k) { return static_cast<int>(std::ldexp(win.side, k)); };
  int nf = cells_at(fine);
  const int block = win.samples / nf;

  auto count = [n](int per_axis) {
    std::size_t c = 1;
    for (int i = 0; i < n; ++i) c *= static_cast<std::size_t>(per_axis);
    return c;
  };
  std::vector<double> integrals(count(nf), 0.0);
  for (std::size_t k = 0; k < win.size(); ++k) {
    const auto idx = sample_index(win, k);
    std::size_t cell = 0;
    for (int i = n - 1; i >= 0; --i) cell = cell * static_cast<std::size_t>(nf) + static_cast<std::size_t>(idx[i] / block);
    integrals[cell] += b.values[static_cast<Eigen::Index>(k)];
  }
  for (auto& v : integrals) v *= win.cell_volume();

  const auto sigs = cancellative_signatures(n);
  for (int k = win.k_max; k >= win.k_min; --k) {
    const int nk = nf / 2;
    std::vector<double> coarse(count(nk), 0.0);
    const double vol = std::ldexp(1.0, -k * n);
    for (std::size_t a = 0; a < coarse.size(); ++a) {
      std::array<int, kMaxDim> ai{};
      std::size_t t = a;
      for (int i = 0; i < n; ++i) {
        ai[i] = static_cast<int>(t % static_cast<std::size_t>(nk));
        t /= static_cast<std::size_t>(nk);
      }
      std::array<double, 8> child{};
      for (unsigned pos = 0; pos < (1u << n); ++pos) {
        std::size_t cell = 0;
        for (int i = n - 1; i >= 0; --i)
          cell = cell * static_cast<std::size_t>(nf) + static_cast<std::size_t>(2 * ai[i] + ((pos >> i) & 1u));
        child[pos] = integrals[cell];
      }
      CubeId q;
      q.shift = out.shift;
      q.level = k;
      for (int i = 0; i < n; ++i)
        q.offset[i] = static_cast<std::int64_t>(std::ldexp(win.lower[i], k)) + ai[i];
      double total = 0.0;
      for (unsigned pos = 0; pos < (1u << n); ++pos) total += child[pos];
      coarse[a] = total;
      for (const auto& sig : sigs) {
        double c = 0.0;
        for (unsigned pos = 0; pos < (1u << n); ++pos) c += haar_child_value(sig, pos, vol) * child[pos];
        out.entries[{q, sig}] = c;
      }
      if (k == win.k_min) out.coarse_averages[q] = total / vol;
    }
    integrals.swap(coarse);
    nf = nk;
  }
  finish_residual(out, b);
  return out;
}

}  // namespace

HaarCoefficients haar_transform(const SampledFunction& b, const Shift& shift) {
  const GridWindow& win = b.window;
  win.validate();
  if (shift.dim != win.dim) throw GridError("shift dimension does not match samples");
  if (pyramid_applicable(win, shift)) return pyramid(b);

  HaarCoefficients out;
  out.window = win;
  out.shift = shift;
  out.path = TransformPath::direct;
  const auto sigs = cancellative_signatures(win.dim);
  for (const auto& q : interior_cubes(win, shift))
    for (const auto& sig : sigs) out.entries[{q, sig}] = haar_coefficient(b, {q, sig});
  for (const auto& q : interior_cubes_at(win, shift, win.k_min)) out.coarse_averages[q] = cube_average(b, q);
  finish_residual(out, b);
  return out;
}

double cube_average(const SampledFunction& b, const CubeId& q) {
  const SampleRange r = cube_samples(b.window, q);
  if (r.empty()) throw GridError("cube " + to_string(q) + " contains no samples of the window");
  double sum = 0.0;
  for_each_sample(b.window, r, [&](std::size_t k) { sum += b.values[static_cast<Eigen::Index>(k)]; });
  return sum / static_cast<double>(r.count());
}

double average_from_coarser(const HaarCoefficients& coeffs, const CubeId& q) {
  const int top = coeffs.window.k_min;
  if (q.level < top) throw GridError("cube is coarser than the window");
  CubeId anc = q;
  std::vector<CubeId> chain;
  while (anc.level > top) {
    chain.push_back(anc);
    anc = parent(anc);
  }
  const auto it = coeffs.coarse_averages.find(anc);
  if (it == coeffs.coarse_averages.end()) throw GridError("no coarse average above " + to_string(q));
  double avg = it->second;
  for (const auto& c : chain) {
    const CubeId r = parent(c);
    const unsigned pos = child_position(c);
    for (const auto& sig : cancellative_signatures(q.dim())) {
      const auto e = coeffs.entries.find({r, sig});
      if (e == coeffs.entries.end()) throw GridError("missing coefficient on " + to_string(r));
      avg += e->second * haar_child_value(sig, pos, r.volume());
    }
  }
  return avg;
}

HaarCoefficients expand_mean_oscillation(const SampledFunction& b, const CubeId& q) {
  const GridWindow& win = b.window;
  if (!win.domain().contains(cube_geometry(q))) throw GridError("cube " + to_string(q) + " is not inside the window");
  HaarCoefficients out;
  out.window = win;
  out.shift = q.shift;
  out.path = TransformPath::direct;
  const auto sigs = cancellative_signatures(win.dim);
  for (int k = q.level; k <= win.k_max; ++k)
    for (const auto& r : descendants_at(q, k))
      for (const auto& sig : sigs) out.entries[{r, sig}] = haar_coefficient(b, {r, sig});
  const double avg = cube_average(b, q);
  out.coarse_averages[q] = avg;
  double energy = 0.0;
  for_each_sample(win, cube_samples(win, q), [&](std::size_t k) {
    const double d = b.values[static_cast<Eigen::Index>(k)] - avg;
    energy += d * d;
  });
  energy *= win.cell_volume();
  for (const auto& [idx, c] : out.entries) energy -= c * c;
  out.residual_energy = energy;
  return out;
}

SampledFunction haar_synthesis(const HaarCoefficients& coeffs, bool include_coarse) {
  const GridWindow& win = coeffs.window;
  SampledFunction out(win);
  for (const auto& [idx, c] : coeffs.entries) {
    if (c == 0.0) continue;
    const double vol = idx.cube.volume();
    for_each_child_range(win, idx.cube, [&](unsigned pos, const SampleRange& r) {
      const double v = c * haar_child_value(idx.sig, pos, vol);
      for_each_sample(win, r, [&](std::size_t k) { out.values[static_cast<Eigen::Index>(k)] += v; });
    });
  }
  if (include_coarse)
    for (const auto& [q, avg] : coeffs.coarse_averages)
      for_each_sample(win, cube_samples(win, q), [&](std::size_t k) { out.values[static_cast<Eigen::Index>(k)] += avg; });
  return out;
}

SampledFunction nwo_maximal(const SampledFunction& f, const CubeFamily& family) {
  SampledFunction out(f.window);
  const double hn = f.window.cell_volume();
  for (const auto& [q, e] : family) {
    if (!e.window.same_lattice(f.window)) throw GridError("family member on a different grid");
    const double val = std::abs(f.values.dot(e.values) * hn) / std::sqrt(q.volume());
    for_each_sample(f.window, cube_samples(f.window, q), [&](std::size_t k) {
      auto& o = out.values[static_cast<Eigen::Index>(k)];
      o = std::max(o, val);
    });
  }
  return out;
}

void write_haar_csv(const HaarCoefficients& coeffs, std::ostream& os) {
  os << "cube,eps,coefficient\n";
  for (const auto& [idx, c] : coeffs.entries)
    os << csv_field(to_string(idx.cube)) << ',' << to_string(idx.sig) << ',' << format_g17(c) << '\n';
}

}  // namespace schatten
