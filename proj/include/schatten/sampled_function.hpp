#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "schatten/dyadic_grid.hpp"

namespace schatten {

/// Samples on the cell centers of a GridWindow; axis 0 varies fastest.
template <typename Scalar>
struct Sampled {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  GridWindow window;
  Vector values;

  Sampled() = default;
  explicit Sampled(const GridWindow& w) : window(w), values(Vector::Zero(static_cast<Eigen::Index>(w.size()))) {}
  Sampled(const GridWindow& w, Vector v) : window(w), values(std::move(v)) {
    if (values.size() != static_cast<Eigen::Index>(w.size())) throw GridError("sample count does not match window");
  }

  double spacing() const { return window.spacing(); }
  Eigen::Index size() const { return values.size(); }
};

using SampledFunction = Sampled<double>;
using ComplexSampledFunction = Sampled<std::complex<double>>;

/// Per-axis half-open sample index ranges.
struct SampleRange {
  int dim = 1;
  std::array<int, kMaxDim> lo{};
  std::array<int, kMaxDim> hi{};

  bool empty() const;
  std::size_t count() const;
};

Point sample_point(const GridWindow& win, std::size_t flat);
std::array<int, kMaxDim> sample_index(const GridWindow& win, std::size_t flat);
std::size_t flat_index(const GridWindow& win, const std::array<int, kMaxDim>& idx);

/// Samples whose centers lie in the box (clipped to the window).
SampleRange box_samples(const GridWindow& win, const Box& box);
SampleRange cube_samples(const GridWindow& win, const CubeId& q);

template <typename F>
void for_each_sample(const GridWindow& win, const SampleRange& r, F&& f) {
  if (r.empty()) return;
  const std::size_t N = static_cast<std::size_t>(win.samples);
  std::array<int, kMaxDim> idx = r.lo;
  for (int i = r.dim; i < kMaxDim; ++i) idx[i] = 0;
  while (true) {
    std::size_t flat = 0;
    for (int i = r.dim - 1; i >= 0; --i) flat = flat * N + static_cast<std::size_t>(idx[i]);
    f(flat);
    int axis = 0;
    while (axis < r.dim) {
      if (++idx[axis] < r.hi[axis]) break;
      idx[axis] = r.lo[axis];
      ++axis;
    }
    if (axis == r.dim) return;
  }
}

SampledFunction sample(const GridWindow& win, const std::function<double(const Point&)>& f);

/// Riemann-sum L2 norm with cell weight h^n.
double l2_norm(const SampledFunction& f);

}  // namespace schatten
