#include "schatten/function_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/FFT>

#include "schatten/csv.hpp"
#include "schatten/haar.hpp"

namespace schatten {

namespace {

double ipow(double x, double p) {
  if (p == 2.0) return x * x;
  if (p == 4.0) {
    const double x2 = x * x;
    return x2 * x2;
  }
  return std::pow(x, p);
}

SampledFunction rewindow(const SampledFunction& b, const GridWindow& win) {
  if (!b.window.same_lattice(win)) throw GridError("window does not share the sample lattice");
  win.validate();
  return SampledFunction(win, b.values);
}

double line_stride(const GridWindow& win, int axis) {
  double s = 1.0;
  for (int i = 0; i < axis; ++i) s *= win.samples;
  return s;
}

}  // namespace

LorentzValue lorentz_functional(std::vector<double> values, const LorentzParams& params) {
  if (!(params.p > 0.0) || !std::isfinite(params.p)) throw std::invalid_argument("Lorentz p must be positive and finite");
  if (!(params.q > 0.0)) throw std::invalid_argument("Lorentz q must be positive");
  for (auto& v : values) v = std::abs(v);
  std::sort(values.begin(), values.end(), std::greater<>());
  LorentzValue out;
  if (values.empty()) return out;
  if (std::isinf(params.q)) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double k = static_cast<double>(i + 1);
      const double v = values[i] * std::pow(1.0 + k, 1.0 / params.p);
      if (v > out.value) {
        out.value = v;
        out.argmax_k = i + 1;
      }
    }
    return out;
  }
  const double e = params.q / params.p - 1.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double term = ipow(values[i], params.q);
    sum += e == 0.0 ? term : term * std::pow(1.0 + k, e);
  }
  out.value = std::pow(sum, 1.0 / params.q);
  return out;
}

double lorentz_norm(const CubeSequence& seq, const LorentzParams& params) {
  std::vector<double> v;
  v.reserve(seq.entries.size());
  for (const auto& [q, a] : seq.entries) v.push_back(a);
  return lorentz_functional(std::move(v), params).value;
}

double besov_continuous(const SampledFunction& b, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("Besov exponent must be positive");
  const GridWindow& win = b.window;
  const int n = win.dim;
  const int N = win.samples;
  const int span = 2 * N - 1;
  std::size_t table_size = 1;
  for (int i = 0; i < n; ++i) table_size *= static_cast<std::size_t>(span);
  // |d|^{-2n} indexed by the shifted offset difference
  std::vector<double> kernel(table_size, 0.0);
  for (std::size_t t = 0; t < table_size; ++t) {
    std::size_t r = t;
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = static_cast<double>(r % span) - (N - 1);
      r /= span;
      d2 += d * d;
    }
    kernel[t] = d2 > 0.0 ? 1.0 / std::pow(d2, n) : 0.0;
  }
  const std::size_t M = win.size();
  std::vector<std::array<int, kMaxDim>> idx(M);
  for (std::size_t k = 0; k < M; ++k) idx[k] = sample_index(win, k);
  double total = 0.0, comp = 0.0;
  for (std::size_t x = 0; x < M; ++x) {
    const double bx = b.values[static_cast<Eigen::Index>(x)];
    double row = 0.0;
    for (std::size_t y = x + 1; y < M; ++y) {
      std::size_t t = 0;
      for (int i = n - 1; i >= 0; --i) t = t * span + static_cast<std::size_t>(idx[x][i] - idx[y][i] + N - 1);
      row += ipow(std::abs(bx - b.values[static_cast<Eigen::Index>(y)]), p) * kernel[t];
    }
    const double yk = row - comp;
    const double tk = total + yk;
    comp = (tk - total) - yk;
    total = tk;
  }
  return std::pow(2.0 * total, 1.0 / p);
}

CubeSequence besov_terms(const SampledFunction& b, double p, const Shift& shift, const GridWindow& win, const Weight* w) {
  if (!(p > 0.0)) throw std::invalid_argument("Besov exponent must be positive");
  const SampledFunction bw = rewindow(b, win);
  const HaarCoefficients coeffs = haar_transform(bw, shift);
  Weight winv;
  if (w) winv = w->inverse();
  CubeSequence seq;
  seq.label = "besov-term";
  for (const auto& [idx, c] : coeffs.entries) {
    double scale = 1.0 / std::sqrt(idx.cube.volume());
    if (w) scale = std::sqrt(idx.cube.volume()) / std::sqrt(weighted_measure(*w, idx.cube) * weighted_measure(winv, idx.cube));
    seq.entries[idx.cube] += ipow(std::abs(c) * scale, p);
  }
  return seq;
}

double besov_dyadic(const SampledFunction& b, double p, const Shift& shift, const GridWindow& win) {
  double sum = 0.0;
  for (const auto& [q, t] : besov_terms(b, p, shift, win).entries) sum += t;
  return std::pow(sum, 1.0 / p);
}

double besov_dyadic(const SampledFunction& b, double p, const Shift& shift) {
  return besov_dyadic(b, p, shift, b.window);
}

double besov_dyadic_weighted(const SampledFunction& b, const Weight& w, double p, const Shift& shift,
                             const GridWindow& win) {
  if (!w.w.window.same_lattice(win)) throw GridError("weight sampled on a different grid");
  double sum = 0.0;
  for (const auto& [q, t] : besov_terms(b, p, shift, win, &w).entries) sum += t;
  return std::pow(sum, 1.0 / p);
}

std::vector<SampledFunction> gradient(const SampledFunction& b, GradientScheme scheme) {
  const GridWindow& win = b.window;
  const int N = win.samples;
  const double h = win.spacing();
  std::vector<SampledFunction> out;
  for (int axis = 0; axis < win.dim; ++axis) {
    SampledFunction g(win);
    const auto stride = static_cast<Eigen::Index>(line_stride(win, axis));
    if (scheme == GradientScheme::centered) {
      for (std::size_t k = 0; k < win.size(); ++k) {
        const int i = sample_index(win, k)[axis];
        const auto kk = static_cast<Eigen::Index>(k);
        double d = 0.0;
        if (i == 0) d = (b.values[kk + stride] - b.values[kk]) / h;
        else if (i == N - 1) d = (b.values[kk] - b.values[kk - stride]) / h;
        else d = (b.values[kk + stride] - b.values[kk - stride]) / (2.0 * h);
        g.values[kk] = d;
      }
    } else {
      Eigen::FFT<double> fft;
      std::vector<std::complex<double>> line(N), spec(N);
      for (std::size_t k = 0; k < win.size(); ++k) {
        if (sample_index(win, k)[axis] != 0) continue;
        const auto base = static_cast<Eigen::Index>(k);
        for (int i = 0; i < N; ++i) line[i] = b.values[base + i * stride];
        fft.fwd(spec, line);
        for (int i = 0; i < N; ++i) {
          const int xi = i <= N / 2 ? i : i - N;
          const double factor = (2 * std::abs(xi) == N) ? 0.0 : 2.0 * std::numbers::pi * xi / win.side;
          spec[i] *= std::complex<double>(0.0, factor);
        }
        fft.inv(line, spec);
        for (int i = 0; i < N; ++i) g.values[base + i * stride] = line[i].real();
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

double sobolev_seminorm(const SampledFunction& b, int p_exponent, GradientScheme scheme) {
  const int p = p_exponent == 0 ? b.window.dim : p_exponent;
  if (p < 1) throw std::invalid_argument("Sobolev exponent must be positive");
  const auto grad = gradient(b, scheme);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < b.size(); ++k) {
    double g2 = 0.0;
    for (const auto& g : grad) g2 += g.values[k] * g.values[k];
    sum += std::pow(std::sqrt(g2), p);
  }
  return std::pow(sum * b.window.cell_volume(), 1.0 / p);
}

OscillationValue oscillation(const SampledFunction& b, const CubeId& q, double alpha, double K) {
  if (!(alpha > 0.0)) throw std::invalid_argument("oscillation exponent must be positive");
  if (!(K >= 1.0)) throw std::invalid_argument("dilation K must be at least 1");
  const GridWindow& win = b.window;
  const double avg = cube_average(b, q);
  const Box big = cube_geometry(q).dilate(K);
  const SampleRange r = box_samples(win, big);
  double sum = 0.0;
  for_each_sample(win, r, [&](std::size_t k) { sum += ipow(std::abs(b.values[static_cast<Eigen::Index>(k)] - avg), alpha); });
  OscillationValue out;
  out.value = std::pow(sum * win.cell_volume() / q.volume(), 1.0 / alpha);
  out.clip_fraction = std::max(0.0, 1.0 - static_cast<double>(r.count()) * win.cell_volume() / big.volume());
  return out;
}

double mean_oscillation(const SampledFunction& b, const CubeId& q) { return oscillation(b, q, 1.0, 1.0).value; }

double mean_deviation(const SampledFunction& b, const CubeId& q, double c) {
  double sum = 0.0;
  for_each_sample(b.window, cube_samples(b.window, q),
                  [&](std::size_t k) { sum += std::abs(b.values[static_cast<Eigen::Index>(k)] - c); });
  return sum * b.window.cell_volume() / q.volume();
}

CubeSequence oscillation_sequence(const SampledFunction& b, const GridWindow& win, double alpha, double K) {
  const SampledFunction bw = rewindow(b, win);
  CubeSequence seq;
  seq.label = "osc";
  for (const auto& q : interior_cubes(win, Shift::zero(win.dim))) seq.entries[q] = oscillation(bw, q, alpha, K).value;
  return seq;
}

CubeSequence mean_oscillation_sequence(const SampledFunction& b, const GridWindow& win) {
  const SampledFunction bw = rewindow(b, win);
  CubeSequence seq;
  seq.label = "mean-osc";
  for (const auto& q : interior_cubes(win, Shift::zero(win.dim))) seq.entries[q] = mean_oscillation(bw, q);
  return seq;
}

void write_cube_sequence_csv(const CubeSequence& seq, std::ostream& os) {
  os << "cube," << seq.label << '\n';
  for (const auto& [q, v] : seq.entries) os << csv_field(to_string(q)) << ',' << format_g17(v) << '\n';
}

}  // namespace schatten
