#include "schatten/sampled_function.hpp"

#include <algorithm>
#include <cmath>

namespace schatten {

bool SampleRange::empty() const {
  for (int i = 0; i < dim; ++i)
    if (lo[i] >= hi[i]) return true;
  return false;
}

std::size_t SampleRange::count() const {
  if (empty()) return 0;
  std::size_t c = 1;
  for (int i = 0; i < dim; ++i) c *= static_cast<std::size_t>(hi[i] - lo[i]);
  return c;
}

std::array<int, kMaxDim> sample_index(const GridWindow& win, std::size_t flat) {
  std::array<int, kMaxDim> idx{};
  const auto N = static_cast<std::size_t>(win.samples);
  for (int i = 0; i < win.dim; ++i) {
    idx[i] = static_cast<int>(flat % N);
    flat /= N;
  }
  return idx;
}

std::size_t flat_index(const GridWindow& win, const std::array<int, kMaxDim>& idx) {
  std::size_t flat = 0;
  const auto N = static_cast<std::size_t>(win.samples);
  for (int i = win.dim - 1; i >= 0; --i) flat = flat * N + static_cast<std::size_t>(idx[i]);
  return flat;
}

Point sample_point(const GridWindow& win, std::size_t flat) {
  const auto idx = sample_index(win, flat);
  const double h = win.spacing();
  Point x{};
  for (int i = 0; i < win.dim; ++i) x[i] = win.lower[i] + (idx[i] + 0.5) * h;
  return x;
}

SampleRange box_samples(const GridWindow& win, const Box& box) {
  SampleRange r;
  r.dim = win.dim;
  const double h = win.spacing();
  for (int i = 0; i < win.dim; ++i) {
    // centers c_j = lower + (j + 1/2) h with box.lower <= c_j < box.upper
    const double a = (box.lower[i] - win.lower[i]) / h - 0.5;
    const double b = (box.upper(i) - win.lower[i]) / h - 0.5;
    r.lo[i] = std::clamp(static_cast<int>(std::ceil(a)), 0, win.samples);
    r.hi[i] = std::clamp(static_cast<int>(std::ceil(b)), 0, win.samples);
  }
  return r;
}

SampleRange cube_samples(const GridWindow& win, const CubeId& q) {
  if (q.dim() != win.dim) throw GridError("cube dimension does not match window");
  return box_samples(win, cube_geometry(q));
}

SampledFunction sample(const GridWindow& win, const std::function<double(const Point&)>& f) {
  SampledFunction out(win);
  for (std::size_t k = 0; k < win.size(); ++k) out.values[static_cast<Eigen::Index>(k)] = f(sample_point(win, k));
  return out;
}

double l2_norm(const SampledFunction& f) {
  return std::sqrt(f.values.squaredNorm() * f.window.cell_volume());
}

}  // namespace schatten
