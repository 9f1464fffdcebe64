#include "schatten/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/FFT>

#include "schatten/function_spaces.hpp"

namespace schatten {

namespace {

using cd = std::complex<double>;

void check_direction(int j, int n) {
  if (j < 1 || j > n) throw std::invalid_argument("Riesz direction must satisfy 1 <= j <= n");
}

int signed_frequency(int i, int N) { return i <= N / 2 ? i : i - N; }

// In-place multidimensional inverse DFT (unnormalized forward sign +) along every axis.
void inverse_fftn(std::vector<cd>& data, const GridWindow& win) {
  const int N = win.samples;
  Eigen::FFT<double> fft;
  std::vector<cd> line(N), out(N);
  std::size_t stride = 1;
  for (int axis = 0; axis < win.dim; ++axis) {
    for (std::size_t base = 0; base < data.size(); ++base) {
      if ((base / stride) % static_cast<std::size_t>(N) != 0) continue;
      for (int i = 0; i < N; ++i) line[i] = data[base + i * stride];
      fft.inv(out, line);
      for (int i = 0; i < N; ++i) data[base + i * stride] = out[i];
    }
    stride *= static_cast<std::size_t>(N);
  }
}

struct CubeBlock {
  CubeId q;
  std::vector<Eigen::Index> samples;
  std::vector<Signature> sigs;
  std::vector<std::vector<double>> h;
  double average = 0.0;
  std::vector<double> coeffs;
};

bool resolvable(const GridWindow& win, const CubeId& q) { return q.side() >= 2.0 * win.spacing() * (1.0 - 1e-12); }

CubeBlock make_block(const GridWindow& win, const CubeId& q) {
  CubeBlock blk;
  blk.q = q;
  blk.sigs = cancellative_signatures(win.dim);
  blk.h.resize(blk.sigs.size());
  const double vol = q.volume();
  for (const auto& c : children(q)) {
    const unsigned pos = child_position(c);
    for_each_sample(win, cube_samples(win, c), [&](std::size_t k) {
      blk.samples.push_back(static_cast<Eigen::Index>(k));
      for (std::size_t s = 0; s < blk.sigs.size(); ++s) blk.h[s].push_back(haar_child_value(blk.sigs[s], pos, vol));
    });
  }
  return blk;
}

void attach_symbol(CubeBlock& blk, const SampledFunction& b, double hn) {
  double sum = 0.0;
  for (auto k : blk.samples) sum += b.values[k];
  blk.average = sum / static_cast<double>(blk.samples.size());
  blk.coeffs.assign(blk.sigs.size(), 0.0);
  for (std::size_t s = 0; s < blk.sigs.size(); ++s) {
    double c = 0.0;
    for (std::size_t t = 0; t < blk.samples.size(); ++t) c += b.values[blk.samples[t]] * blk.h[s][t];
    blk.coeffs[s] = c * hn;
  }
}

std::vector<CubeBlock> window_blocks(const GridWindow& win) {
  win.validate();
  std::vector<CubeBlock> out;
  for (const auto& q : interior_cubes(win, Shift::zero(win.dim)))
    if (resolvable(win, q)) out.push_back(make_block(win, q));
  return out;
}

RealOperator zero_operator(const GridWindow& win, const std::string& mode) {
  RealOperator T;
  T.window = win;
  T.mode = mode;
  const auto M = static_cast<Eigen::Index>(win.size());
  T.entries = Eigen::MatrixXd::Zero(M, M);
  return T;
}

void check_samples(const SampledFunction& b, const GridWindow& win) {
  if (!b.window.same_lattice(win)) throw GridError("symbol sampled on a different grid");
}

// Visits (Q block, sigma(Q) block, sig index, mapped sig index) for kept shift terms.
template <typename F>
void for_each_shift_term(const GridWindow& win, const ShiftMap& sm, const std::vector<CubeBlock>& blocks, F&& f) {
  for (const auto& blk : blocks) {
    const CubeId sq = sm.cube_map(blk.q);
    if (sq.level != blk.q.level + 1 || relate(blk.q, sq) != CubeRelation::second_inside)
      throw std::invalid_argument("shift map must send a cube to one of its children");
    if (!resolvable(win, sq)) continue;
    const CubeBlock sblk = make_block(win, sq);
    for (std::size_t s = 0; s < blk.sigs.size(); ++s) {
      const auto mapped = sm.sig_map(blk.sigs[s]);
      if (!mapped) continue;
      const auto it = std::find(sblk.sigs.begin(), sblk.sigs.end(), *mapped);
      if (it == sblk.sigs.end()) throw std::invalid_argument("shift map produced a non-cancellative signature");
      f(blk, sblk, s, static_cast<std::size_t>(it - sblk.sigs.begin()));
    }
  }
}

}  // namespace

std::string to_string(RieszMode mode) {
  return mode == RieszMode::periodic_multiplier ? "periodic-multiplier" : "truncated-kernel";
}

RieszMode parse_riesz_mode(const std::string& text) {
  if (text == "periodic-multiplier" || text == "periodic") return RieszMode::periodic_multiplier;
  if (text == "truncated-kernel" || text == "kernel") return RieszMode::truncated_kernel;
  throw std::invalid_argument("unknown Riesz mode: " + text);
}

double riesz_constant(int n) { return std::tgamma((n + 1) / 2.0) / std::pow(std::numbers::pi, (n + 1) / 2.0); }

double riesz_kernel(int j, const Point& z, int n) {
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += z[i] * z[i];
  if (r2 == 0.0) return 0.0;
  return riesz_constant(n) * z[j - 1] / std::pow(std::sqrt(r2), n + 1);
}

std::complex<double> riesz_symbol(int j, const std::array<int, kMaxDim>& freq, int samples, int n) {
  check_direction(j, n);
  double r2 = 0.0;
  int top = 0;
  for (int i = 0; i < n; ++i) {
    r2 += static_cast<double>(freq[i]) * freq[i];
    top = std::max(top, std::abs(freq[i]));
  }
  if (r2 == 0.0 || 2 * top >= samples) return 0.0;
  const double t = 2.0 * top / samples;
  const double taper = t <= kRieszTaperStart
                           ? 1.0
                           : std::pow(std::cos(0.5 * std::numbers::pi * (t - kRieszTaperStart) / (1.0 - kRieszTaperStart)), 2);
  return cd(0.0, -taper * freq[j - 1] / std::sqrt(r2));
}

RealOperator riesz_matrix(int j, const GridWindow& win, RieszMode mode) {
  check_direction(j, win.dim);
  const auto M = static_cast<Eigen::Index>(win.size());
  const int N = win.samples;
  RealOperator T;
  T.window = win;
  T.mode = "riesz-" + std::to_string(j) + "-" + to_string(mode);
  T.entries.resize(M, M);
  std::vector<std::array<int, kMaxDim>> idx(win.size());
  for (std::size_t k = 0; k < win.size(); ++k) idx[k] = sample_index(win, k);

  if (mode == RieszMode::periodic_multiplier) {
    std::vector<cd> kernel(win.size());
    for (std::size_t k = 0; k < win.size(); ++k) {
      std::array<int, kMaxDim> f{};
      for (int i = 0; i < win.dim; ++i) f[i] = signed_frequency(idx[k][i], N);
      kernel[k] = riesz_symbol(j, f, N, win.dim);
    }
    inverse_fftn(kernel, win);
    for (Eigen::Index y = 0; y < M; ++y)
      for (Eigen::Index x = 0; x < M; ++x) {
        std::array<int, kMaxDim> d{};
        for (int i = 0; i < win.dim; ++i) d[i] = ((idx[x][i] - idx[y][i]) % N + N) % N;
        T.entries(x, y) = kernel[flat_index(win, d)].real();
      }
    return T;
  }

  const double h = win.spacing();
  const double hn = win.cell_volume();
  for (Eigen::Index y = 0; y < M; ++y)
    for (Eigen::Index x = 0; x < M; ++x) {
      Point z{};
      for (int i = 0; i < win.dim; ++i) z[i] = (idx[x][i] - idx[y][i]) * h;
      T.entries(x, y) = riesz_kernel(j, z, win.dim) * hn;
    }
  return T;
}

ShiftMap ShiftMap::first_child() {
  ShiftMap sm;
  sm.cube_map = [](const CubeId& q) { return children(q).front(); };
  sm.sig_map = [](const Signature& s) { return std::optional<Signature>(s); };
  return sm;
}

HaarBasis haar_basis(const GridWindow& win) {
  HaarBasis basis;
  for (const auto& blk : window_blocks(win))
    for (std::size_t s = 0; s < blk.sigs.size(); ++s) {
      basis.indices.push_back({blk.q, blk.sigs[s]});
      std::vector<std::pair<Eigen::Index, double>> sup;
      for (std::size_t t = 0; t < blk.samples.size(); ++t) sup.emplace_back(blk.samples[t], blk.h[s][t]);
      basis.support.push_back(std::move(sup));
    }
  return basis;
}

RealOperator dyadic_shift(const GridWindow& win, const ShiftMap& sm) {
  RealOperator S = zero_operator(win, "dyadic-shift");
  const double hn = win.cell_volume();
  const auto blocks = window_blocks(win);
  for_each_shift_term(win, sm, blocks, [&](const CubeBlock& q, const CubeBlock& sq, std::size_t s, std::size_t ms) {
    for (std::size_t a = 0; a < sq.samples.size(); ++a)
      for (std::size_t c = 0; c < q.samples.size(); ++c)
        S.entries(sq.samples[a], q.samples[c]) += sq.h[ms][a] * q.h[s][c] * hn;
  });
  return S;
}

Paraproducts paraproducts(const SampledFunction& b, const GridWindow& win) {
  check_samples(b, win);
  Paraproducts out;
  out.pi = zero_operator(win, "paraproduct");
  out.pi_star = zero_operator(win, "paraproduct-adjoint");
  out.gamma = zero_operator(win, "paraproduct-gamma");
  out.gamma_vanishes = win.dim == 1;
  const double hn = win.cell_volume();
  auto blocks = window_blocks(win);
  for (auto& blk : blocks) {
    attach_symbol(blk, b, hn);
    const std::size_t m = blk.samples.size();
    const double inv_vol = 1.0 / blk.q.volume();
    std::vector<double> u(m, 0.0);
    for (std::size_t s = 0; s < blk.sigs.size(); ++s)
      for (std::size_t t = 0; t < m; ++t) u[t] += blk.coeffs[s] * blk.h[s][t];
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t a = 0; a < m; ++a) {
        out.pi.entries(blk.samples[a], blk.samples[c]) += u[a] * hn * inv_vol;
        out.pi_star.entries(blk.samples[a], blk.samples[c]) += u[c] * hn * inv_vol;
      }
    if (out.gamma_vanishes) continue;
    for (std::size_t e = 0; e < blk.sigs.size(); ++e)
      for (std::size_t g = 0; g < blk.sigs.size(); ++g) {
        if (e == g) continue;
        for (std::size_t c = 0; c < m; ++c)
          for (std::size_t a = 0; a < m; ++a)
            out.gamma.entries(blk.samples[a], blk.samples[c]) +=
                blk.coeffs[e] * blk.h[e][a] * blk.h[g][a] * blk.h[g][c] * hn;
      }
  }
  return out;
}

RealOperator average_paraproduct(const SampledFunction& b, const GridWindow& win) {
  check_samples(b, win);
  RealOperator D = zero_operator(win, "average-paraproduct");
  const double hn = win.cell_volume();
  auto blocks = window_blocks(win);
  for (auto& blk : blocks) {
    attach_symbol(blk, b, hn);
    const std::size_t m = blk.samples.size();
    for (std::size_t s = 0; s < blk.sigs.size(); ++s)
      for (std::size_t c = 0; c < m; ++c)
        for (std::size_t a = 0; a < m; ++a)
          D.entries(blk.samples[a], blk.samples[c]) += blk.average * blk.h[s][a] * blk.h[s][c] * hn;
  }
  return D;
}

RealOperator remainder_operator(const SampledFunction& b, const ShiftMap& sm, const GridWindow& win) {
  check_samples(b, win);
  RealOperator R = zero_operator(win, "remainder");
  const double hn = win.cell_volume();
  auto blocks = window_blocks(win);
  for (auto& blk : blocks) attach_symbol(blk, b, hn);
  for_each_shift_term(win, sm, blocks, [&](const CubeBlock& q, const CubeBlock& sq, std::size_t s, std::size_t ms) {
    const unsigned pos = child_position(sq.q);
    double kappa = 0.0;
    for (std::size_t e = 0; e < q.sigs.size(); ++e) kappa += q.coeffs[e] * haar_child_value(q.sigs[e], pos, q.q.volume());
    for (std::size_t a = 0; a < sq.samples.size(); ++a)
      for (std::size_t c = 0; c < q.samples.size(); ++c)
        R.entries(sq.samples[a], q.samples[c]) += kappa * sq.h[ms][a] * q.h[s][c] * hn;
  });
  return R;
}

RealOperator remainder_by_definition(const SampledFunction& b, const ShiftMap& sm, const GridWindow& win) {
  const RealOperator S = dyadic_shift(win, sm);
  const RealOperator D = average_paraproduct(b, win);
  RealOperator R = zero_operator(win, "remainder-definition");
  R.entries = D.entries * S.entries - S.entries * D.entries;
  return R;
}

std::complex<double> KernelExpansion::coefficient(std::span<const int> ell) const {
  if (static_cast<int>(ell.size()) != 2 * dim) throw std::invalid_argument("frequency index needs 2n entries");
  const int span = 2 * l_max + 1;
  std::size_t flat = 0;
  for (int a = 2 * dim - 1; a >= 0; --a) {
    if (std::abs(ell[a]) > l_max) throw std::out_of_range("frequency outside the computed range");
    flat = flat * span + static_cast<std::size_t>(ell[a] + l_max);
  }
  return coefficients[flat];
}

namespace {

// Mode product along one axis of a tensor with axis 0 fastest.
std::vector<cd> mode_product(const std::vector<cd>& in, std::vector<int>& dims, int axis, const Eigen::MatrixXcd& E) {
  std::size_t inner = 1, outer = 1;
  for (int a = 0; a < axis; ++a) inner *= static_cast<std::size_t>(dims[a]);
  for (std::size_t a = axis + 1; a < dims.size(); ++a) outer *= static_cast<std::size_t>(dims[a]);
  const auto rows = static_cast<std::size_t>(E.rows()), cols = static_cast<std::size_t>(E.cols());
  std::vector<cd> out(inner * outer * rows, cd(0.0));
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t l = 0; l < rows; ++l)
      for (std::size_t a = 0; a < cols; ++a) {
        const cd e = E(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(a));
        const cd* src = &in[(o * cols + a) * inner];
        cd* dst = &out[(o * rows + l) * inner];
        for (std::size_t i = 0; i < inner; ++i) dst[i] += e * src[i];
      }
  dims[axis] = static_cast<int>(rows);
  return out;
}

}  // namespace

KernelExpansion kernel_fourier_expansion(const WhitneyPair& pair, int j, int l_max, int quadrature) {
  const int n = pair.q.dim();
  check_direction(j, n);
  if (l_max < 0) throw std::invalid_argument("L_max must be nonnegative");
  if (pair.q.level != pair.r.level) throw std::invalid_argument("Whitney pair cubes differ in size");
  if (!(cube_distance(pair.q, pair.r) > 0.0)) throw std::invalid_argument("Whitney pair overlaps the diagonal");
  const int M = quadrature > 0 ? quadrature : (n == 1 ? 64 : (n == 2 ? 24 : 10));
  const int span = 2 * l_max + 1;
  const Box bq = cube_geometry(pair.q), br = cube_geometry(pair.r);
  const double ell = bq.side;

  std::vector<double> nodes(M);
  for (int a = 0; a < M; ++a) nodes[a] = (a + 0.5) / M - 0.5;

  const int axes = 2 * n;
  std::size_t total = 1;
  for (int a = 0; a < axes; ++a) total *= static_cast<std::size_t>(M);
  std::vector<cd> K(total);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t r = t;
    Point z{};
    for (int a = 0; a < axes; ++a) {
      const double u = nodes[r % M];
      r /= M;
      if (a < n) z[a] += bq.lower[a] + ell * (u + 0.5);
      else z[a - n] -= br.lower[a - n] + ell * (u + 0.5);
    }
    K[t] = riesz_kernel(j, z, n);
  }

  Eigen::MatrixXcd fwd(span, M), inv(M, span);
  for (int l = 0; l < span; ++l)
    for (int a = 0; a < M; ++a) {
      const double phase = 2.0 * std::numbers::pi * (l - l_max) * nodes[a];
      fwd(l, a) = std::polar(1.0 / M, -phase);
      inv(a, l) = std::polar(1.0, phase);
    }

  KernelExpansion out;
  out.dim = n;
  out.l_max = l_max;
  out.quadrature = M;
  out.cube_volume = pair.q.volume();
  std::vector<int> dims(axes, M);
  std::vector<cd> c = K;
  for (int a = 0; a < axes; ++a) c = mode_product(c, dims, a, fwd);
  out.coefficients = c;

  std::vector<cd> rec = c;
  for (int a = 0; a < axes; ++a) rec = mode_product(rec, dims, a, inv);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < total; ++t) {
    num += std::norm(rec[t] - K[t]);
    den += std::norm(K[t]);
  }
  out.reconstruction_residual = std::sqrt(num / den);

  double cmax = 0.0;
  for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, cnt = 0.0;
  for (std::size_t t = 0; t < c.size(); ++t) {
    const double mag = std::abs(c[t]) * out.cube_volume;
    if (!(std::abs(c[t]) > 1e-14 * cmax)) continue;
    std::size_t r = t;
    double l2 = 0.0;
    for (int a = 0; a < axes; ++a) {
      const double l = static_cast<double>(r % span) - l_max;
      r /= span;
      l2 += l * l;
    }
    const double x = std::log1p(std::sqrt(l2)), y = std::log(mag);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    cnt += 1.0;
  }
  const double denom = cnt * sxx - sx * sx;
  out.decay_exponent = denom > 0.0 ? -(cnt * sxy - sx * sy) / denom : 0.0;
  return out;
}

double lower_median(const SampledFunction& b, const CubeId& q) {
  std::vector<double> v;
  for_each_sample(b.window, cube_samples(b.window, q), [&](std::size_t k) { v.push_back(b.values[static_cast<Eigen::Index>(k)]); });
  if (v.empty()) throw GridError("median over an empty cube");
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

NecessityResult necessity_test_operator(const SampledFunction& b, const CubeId& q, int j, const Weight& w) {
  return necessity_test_operator(b, q, j, w, riesz_matrix(j, b.window, RieszMode::truncated_kernel));
}

NecessityResult necessity_test_operator(const SampledFunction& b, const CubeId& q, int j, const Weight& w,
                                        const RealOperator& riesz_kernel_matrix) {
  const GridWindow& win = b.window;
  check_direction(j, win.dim);
  NecessityResult res;
  res.far = far_cube(q, j, win);
  res.median = lower_median(b, res.far);
  const double hn = win.cell_volume();
  const double vol = q.volume();

  std::vector<Eigen::Index> xs, ys;
  for_each_sample(win, cube_samples(win, q), [&](std::size_t k) { xs.push_back(static_cast<Eigen::Index>(k)); });
  for_each_sample(win, cube_samples(win, res.far), [&](std::size_t k) { ys.push_back(static_cast<Eigen::Index>(k)); });

  res.L = zero_operator(win, "necessity-test");
  const double h = win.spacing();
  double closed = 0.0;
  for (auto x : xs) {
    const double eps = b.values[x] - res.median >= 0.0 ? 1.0 : -1.0;
    const auto ix = sample_index(win, static_cast<std::size_t>(x));
    double inner = 0.0;
    for (auto y : ys) {
      const auto iy = sample_index(win, static_cast<std::size_t>(y));
      Point z{};
      for (int i = 0; i < win.dim; ++i) z[i] = (ix[i] - iy[i]) * h;
      res.L.entries(x, y) = eps / (vol * vol * riesz_kernel(j, z, win.dim)) * hn;
      inner += b.values[x] - b.values[y];
    }
    closed += eps * inner;
  }
  res.trace_closed_form = closed * hn * hn / (vol * vol);

  const RealOperator T = conjugate_by_weight(commutator(b, riesz_kernel_matrix), w);
  const RealOperator L = conjugate_by_weight(res.L, w);
  res.trace_matrix = T.entries.cwiseProduct(L.entries.transpose()).sum();
  res.far_mean_deviation = mean_deviation(b, q, cube_average(b, res.far));
  return res;
}

double GammaSet::anticommutation_residual() const {
  double worst = 0.0;
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      const Eigen::MatrixXcd r = gamma[a] * gamma[c] + gamma[c] * gamma[a] - (a == c ? 2.0 : 0.0) * I;
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  return worst;
}

GammaSet make_gamma_set(int n) {
  GammaSet g;
  g.n = n;
  if (n == 1) {
    g.N = 1;
    g.gamma.push_back(Eigen::MatrixXcd::Identity(1, 1));
    return g;
  }
  if (n != 2 && n != 3) throw std::invalid_argument("gamma matrices are provided for n = 1, 2, 3");
  g.N = 2;
  Eigen::MatrixXcd sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, cd(0, -1), cd(0, 1), 0;
  sz << 1, 0, 0, -1;
  g.gamma = {sx, sy};
  if (n == 3) g.gamma.push_back(sz);
  return g;
}

ComplexOperator quantised_derivative(const SampledFunction& f, const GridWindow& win, const GammaSet& gammas,
                                     const Weight* w) {
  if (gammas.n != win.dim) throw std::invalid_argument("gamma set dimension does not match the window");
  check_samples(f, win);
  const auto M = static_cast<Eigen::Index>(win.size());
  ComplexOperator out;
  out.window = win;
  out.mode = "quantised-derivative";
  out.entries = DenseMatrix<cd>::Zero(gammas.N * M, gammas.N * M);
  for (int j = 1; j <= win.dim; ++j) {
    RealOperator A = commutator(f, riesz_matrix(j, win, RieszMode::periodic_multiplier));
    if (w) A = conjugate_by_weight(A, *w);
    const Eigen::MatrixXcd& g = gammas.gamma[j - 1];
    for (int a = 0; a < gammas.N; ++a)
      for (int c = 0; c < gammas.N; ++c) {
        if (g(a, c) == cd(0.0)) continue;
        out.entries.block(a * M, c * M, M, M) -= g(a, c) * A.entries.cast<cd>();
      }
  }
  return out;
}

QuantisedBlocks quantised_derivative_blocks(const SampledFunction& f, const GridWindow& win, const Weight* w) {
  if (win.dim != 2) throw std::invalid_argument("block structure is for the two-dimensional Pauli choice");
  check_samples(f, win);
  RealOperator A1 = commutator(f, riesz_matrix(1, win, RieszMode::periodic_multiplier));
  RealOperator A2 = commutator(f, riesz_matrix(2, win, RieszMode::periodic_multiplier));
  if (w) {
    A1 = conjugate_by_weight(A1, *w);
    A2 = conjugate_by_weight(A2, *w);
  }
  QuantisedBlocks blk;
  blk.upper = -(A1.entries.cast<cd>() - cd(0, 1) * A2.entries.cast<cd>());
  blk.lower = -(A1.entries.cast<cd>() + cd(0, 1) * A2.entries.cast<cd>());
  return blk;
}

}  // namespace schatten
