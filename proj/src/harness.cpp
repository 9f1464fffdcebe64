#include "schatten/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "schatten/csv.hpp"
#include "schatten/function_spaces.hpp"
#include "schatten/haar.hpp"

namespace schatten {

namespace {

double threshold(const ExperimentConfig& cfg, const std::string& name, double fallback) {
  const auto it = cfg.thresholds.find(name);
  return it == cfg.thresholds.end() ? fallback : it->second;
}

bool is_constant(const SampledFunction& b) {
  if (b.size() == 0) return true;
  return b.values.maxCoeff() == b.values.minCoeff();
}

std::string row_key(const std::string& symbol, const std::string& weight, int N) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", N);
  return symbol + "|" + weight + "|N=" + buf;
}

std::uint64_t hash_values(const Eigen::VectorXd& v, std::uint64_t seed = 1469598103934665603ull) {
  return fnv1a(v.data(), static_cast<std::size_t>(v.size()) * sizeof(double), seed);
}

void check_common(const ExperimentConfig& cfg) {
  if (cfg.dim < 1 || cfg.dim > kMaxDim) throw ConfigError("dimension must be 1, 2 or 3");
  if (cfg.grid_sizes.empty()) throw ConfigError("grid_sizes must not be empty");
  int prev = 0;
  for (int N : cfg.grid_sizes) {
    if (N < 4 || (N & (N - 1)) != 0) throw ConfigError("grid sizes must be powers of two >= 4");
    if (N <= prev) throw ConfigError("grid sizes must be ascending");
    prev = N;
  }
  if (cfg.weights.empty()) throw ConfigError("at least one weight is required");
  if (cfg.direction < 1 || cfg.direction > cfg.dim) throw ConfigError("direction j must lie in 1..n");
}

void require_p_above_n(const ExperimentConfig& cfg) {
  if (!(cfg.p > cfg.dim)) throw ConfigError("this experiment needs p > n");
}

Weight build_weight(const WeightSpec& spec, const GridWindow& win) {
  try {
    return make_weight(spec, win);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

SampledFunction build_symbol(const SymbolSpec& spec, const GridWindow& win) {
  try {
    return symbol_library(spec, win);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

struct Sweep {
  SymbolSpec symbol;
  WeightSpec weight;
  int N = 0;
};

std::vector<Sweep> sweep(const ExperimentConfig& cfg) {
  std::vector<Sweep> out;
  for (int N : cfg.grid_sizes)
    for (const auto& w : cfg.weights)
      for (const auto& s : cfg.resolved_symbols()) out.push_back({s, w, N});
  return out;
}

RatioReport finish_report(const std::string& name, std::vector<RatioRow> rows) {
  RatioReport r;
  r.experiment = name;
  r.rows = std::move(rows);
  r.summarize();
  return r;
}

/// max over groups of (max ratio / min ratio) within the group.
template <typename KeyFn>
double group_spread(const std::vector<RatioRow>& rows, KeyFn key, const std::string& value = "") {
  std::map<std::string, std::pair<double, double>> ext;
  for (const auto& row : rows) {
    if (row.degenerate) continue;
    const double v = value.empty() ? row.ratio : row.values.at(value);
    if (!(v > 0.0)) continue;
    auto [it, fresh] = ext.try_emplace(key(row), v, v);
    if (!fresh) {
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
    }
  }
  double spread = 1.0;
  for (const auto& [k, mm] : ext) spread = std::max(spread, mm.second / mm.first);
  return spread;
}

}  // namespace

std::vector<SymbolSpec> ExperimentConfig::resolved_symbols() const {
  return symbols.empty() ? default_symbol_family(dim) : symbols;
}

void RatioReport::summarize() {
  std::sort(rows.begin(), rows.end(), [](const RatioRow& a, const RatioRow& b) { return a.key < b.key; });
  bool any = false;
  for (const auto& row : rows) {
    if (row.degenerate) continue;
    if (!any) {
      min_ratio = max_ratio = row.ratio;
      any = true;
    }
    min_ratio = std::min(min_ratio, row.ratio);
    max_ratio = std::max(max_ratio, row.ratio);
  }
  if (!any) min_ratio = max_ratio = 0.0;
  spread = (any && min_ratio > 0.0) ? max_ratio / min_ratio : (any ? kInf : 1.0);
}

SingularSpectrum SpectrumCache::get(const std::string& key, const std::function<SingularSpectrum()>& make) {
  {
    std::lock_guard lock(mutex_);
    const auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  SingularSpectrum s = make();
  std::lock_guard lock(mutex_);
  return entries_.try_emplace(key, std::move(s)).first->second;
}

std::size_t SpectrumCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

SingularSpectrum commutator_spectrum(const SampledFunction& b, const Weight& w, int j, RieszMode mode,
                                     SpectrumCache* cache) {
  auto make = [&] {
    RealOperator T = commutator(b, riesz_matrix(j, b.window, mode));
    T.ip_weight = w;
    return singular_values(T);
  };
  if (!cache) return make();
  char head[64];
  std::snprintf(head, sizeof head, "commutator|n=%d|N=%d|j=%d|", b.window.dim, b.window.samples, j);
  const std::uint64_t h = hash_values(w.w.values, hash_values(b.values));
  const std::string key = std::string(head) + to_string(mode) + "|" + std::to_string(h);
  return cache->get(key, make);
}

int harness_threads() {
  const char* env = std::getenv("SCHATTEN_LAB_THREADS");
  if (!env) return 1;
  const int t = std::atoi(env);
  return std::clamp(t, 1, 64);
}

std::vector<RatioRow> run_jobs(const std::vector<std::function<RatioRow()>>& jobs) {
  std::vector<RatioRow> rows(jobs.size());
  const int workers = std::min<int>(harness_threads(), static_cast<int>(jobs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) rows[i] = jobs[i]();
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) {
        try {
          rows[i] = jobs[i]();
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

RatioReport exp_theorem11_upper(const ExperimentConfig& cfg, SpectrumCache* cache) {
  check_common(cfg);
  require_p_above_n(cfg);
  std::vector<std::function<RatioRow()>> jobs;
  for (const auto& sw : sweep(cfg))
    jobs.push_back([&cfg, sw, cache] {
      const GridWindow win = GridWindow::unit(cfg.dim, sw.N);
      const SampledFunction b = build_symbol(sw.symbol, win);
      const Weight w = build_weight(sw.weight, win);
      RatioRow row;
      row.symbol = sw.symbol.label;
      row.weight = to_string(sw.weight, cfg.dim);
      row.N = sw.N;
      row.key = row_key(row.symbol, row.weight, row.N);
      row.exploratory = cfg.dim == 1;
      row.values["schatten"] = 0.0;
      row.values["besov"] = 0.0;
      if (is_constant(b)) {
        row.degenerate = true;
        return row;
      }
      const SingularSpectrum s = commutator_spectrum(b, w, cfg.direction, RieszMode::periodic_multiplier, cache);
      const double sp = schatten_norm(s, cfg.p, cfg.p);
      const double bs = besov_continuous(b, cfg.p);
      row.values["schatten"] = sp;
      row.values["besov"] = bs;
      row.ratio = sp / bs;
      return row;
    });
  RatioReport rep = finish_report("theorem11", run_jobs(jobs));
  rep.constants["weight_uniformity"] =
      group_spread(rep.rows, [](const RatioRow& r) { return r.symbol + "|" + std::to_string(r.N); });
  return rep;
}

RatioReport exp_median_lower(const ExperimentConfig& cfg, SpectrumCache* cache) {
  check_common(cfg);
  require_p_above_n(cfg);
  const int n = cfg.dim;
  const int j = cfg.direction;
  std::vector<std::function<RatioRow()>> jobs;
  for (const auto& sw : sweep(cfg))
    jobs.push_back([&cfg, sw, cache, n, j] {
      const GridWindow win = GridWindow::unit(n, sw.N);
      const SampledFunction b = build_symbol(sw.symbol, win);
      const Weight w = build_weight(sw.weight, win);
      const Weight winv = w.inverse();
      RatioRow row;
      row.symbol = sw.symbol.label;
      row.weight = to_string(sw.weight, n);
      row.N = sw.N;
      row.key = row_key(row.symbol, row.weight, row.N);
      row.exploratory = n == 1;

      std::vector<CubeId> cubes;
      for (const auto& q : interior_cubes(win, Shift::zero(n))) {
        try {
          (void)far_cube(q, j, win);
          cubes.push_back(q);
        } catch (const GridError&) {
        }
      }
      double median_excess = 0.0;
      for (const auto& q : cubes) {
        const CubeId far = far_cube(q, j, win);
        const double m = lower_median(b, far);
        std::size_t below = 0, above = 0, total = 0;
        for_each_sample(win, cube_samples(win, far), [&](std::size_t k) {
          const double v = b.values[static_cast<Eigen::Index>(k)];
          below += v < m;
          above += v > m;
          ++total;
        });
        median_excess = std::max(median_excess, (2.0 * static_cast<double>(std::max(below, above)) - total) / total);
      }
      row.values["median_excess"] = median_excess;
      row.values["cubes"] = static_cast<double>(cubes.size());
      row.values["besov_weighted"] = 0.0;
      row.values["median_terms"] = 0.0;
      row.values["schatten"] = 0.0;
      if (is_constant(b)) {
        row.degenerate = true;
        return row;
      }

      const CubeSequence terms = besov_terms(b, cfg.p, Shift::zero(n), win, &w);
      const RealOperator R = riesz_matrix(j, win, RieszMode::truncated_kernel);
      const double hn = win.cell_volume();
      double lhs = 0.0, rhs = 0.0, g_size = 0.0, h_size = 0.0;
      const double r = 2.0 * (reverse_holder_index(w, win, default_sigma_ladder()).sigma + 1.0);
      for (const auto& q : cubes) {
        const auto it = terms.entries.find(q);
        if (it != terms.entries.end()) lhs += it->second;
        const CubeId far = far_cube(q, j, win);
        const double m = lower_median(b, far);
        const double wq = weighted_measure(w, far);
        const double wiq = weighted_measure(winv, q);
        std::vector<std::size_t> xs, ys;
        for_each_sample(win, cube_samples(win, q), [&](std::size_t k) { xs.push_back(k); });
        for_each_sample(win, cube_samples(win, far), [&](std::size_t k) { ys.push_back(k); });
        double term_sum = 0.0;
        for (int s = 1; s <= 2; ++s) {
          auto in_e = [&](double v) { return s == 1 ? v < m : v > m; };
          auto in_f = [&](double v) { return s == 1 ? v >= m : v <= m; };
          double ip = 0.0, gn = 0.0, hn_r = 0.0;
          for (std::size_t y : ys) {
            const auto yy = static_cast<Eigen::Index>(y);
            if (in_f(b.values[yy])) gn += std::pow(w.w.values[yy] / wq, r / 2.0);
          }
          for (std::size_t x : xs) {
            const auto xx = static_cast<Eigen::Index>(x);
            if (!in_e(b.values[xx])) continue;
            const double hx = 1.0 / std::sqrt(winv.w.values[xx] * wiq);
            hn_r += std::pow(hx, r);
            double inner = 0.0;
            for (std::size_t y : ys) {
              const auto yy = static_cast<Eigen::Index>(y);
              if (!in_f(b.values[yy])) continue;
              const double gy = std::sqrt(w.w.values[yy] / wq);
              inner += std::sqrt(w.w.values[xx]) * (b.values[xx] - b.values[yy]) * R.entries(xx, yy) /
                       std::sqrt(w.w.values[yy]) * gy;
            }
            ip += hx * inner * hn;
          }
          term_sum += std::abs(ip);
          const double scale = std::pow(q.volume(), 1.0 / r - 0.5);
          g_size = std::max(g_size, std::pow(gn * hn, 1.0 / r) / scale);
          h_size = std::max(h_size, std::pow(hn_r * hn, 1.0 / r) / scale);
        }
        rhs += ((1 << n) - 1) * std::pow(term_sum, cfg.p);
      }
      lhs = std::pow(lhs, 1.0 / cfg.p);
      rhs = std::pow(rhs, 1.0 / cfg.p);
      const SingularSpectrum s = commutator_spectrum(b, w, j, RieszMode::periodic_multiplier, cache);
      const double sp = schatten_norm(s, cfg.p, cfg.p);
      row.values["besov_weighted"] = lhs;
      row.values["median_terms"] = rhs;
      row.values["schatten"] = sp;
      row.values["besov_over_terms"] = rhs > 0.0 ? lhs / rhs : 0.0;
      row.values["terms_over_schatten"] = sp > 0.0 ? rhs / sp : 0.0;
      row.values["nwo_size_g"] = g_size;
      row.values["nwo_size_h"] = h_size;
      row.values["nwo_exponent"] = r;
      row.ratio = sp > 0.0 ? lhs / sp : 0.0;
      return row;
    });
  RatioReport rep = finish_report("median", run_jobs(jobs));
  bool median_ok = true, positive = true;
  for (const auto& row : rep.rows) {
    median_ok = median_ok && row.values.at("median_excess") <= 0.0;
    if (!row.degenerate) positive = positive && row.values.at("median_terms") > 0.0 && row.ratio > 0.0;
  }
  rep.checks["median_property"] = median_ok;
  rep.checks["lower_bound_positive"] = positive;
  rep.constants["resolution_spread"] =
      group_spread(rep.rows, [](const RatioRow& r) { return r.symbol + "|" + r.weight; });
  return rep;
}

RatioReport exp_collapse(const ExperimentConfig& cfg, SpectrumCache* cache) {
  check_common(cfg);
  const int n = cfg.dim;
  if (cfg.levels.size() < 2) throw ConfigError("collapse needs at least two levels");
  for (std::size_t i = 0; i < cfg.levels.size(); ++i)
    if (cfg.levels[i] < 1 || (i && cfg.levels[i] <= cfg.levels[i - 1]))
      throw ConfigError("collapse levels must be ascending and positive");
  const WeightSpec wspec = cfg.weights.front();
  std::vector<std::function<RatioRow()>> jobs;
  for (const auto& sym : cfg.resolved_symbols())
    for (int kmax : cfg.levels)
      jobs.push_back([&cfg, sym, wspec, kmax, cache, n] {
        const int N = 1 << (kmax + 1);
        const GridWindow win = GridWindow::unit(n, N, 0, kmax);
        const SampledFunction b = build_symbol(sym, win);
        const Weight w = build_weight(wspec, win);
        RatioRow row;
        row.symbol = sym.label;
        row.weight = to_string(wspec, n);
        row.N = N;
        row.key = row_key(row.symbol, row.weight, row.N);
        row.values["k_max"] = kmax;
        row.values["collapse_sum"] = 0.0;
        row.values["weak_norm"] = 0.0;
        if (is_constant(b)) {
          row.degenerate = true;
          return row;
        }
        double sum = 0.0;
        for (const auto& q : interior_cubes(win, Shift::zero(n))) {
          CubeId far;
          try {
            far = far_cube(q, cfg.direction, win);
          } catch (const GridError&) {
            continue;
          }
          sum += std::pow(mean_deviation(b, q, cube_average(b, far)), n);
        }
        const double collapse = std::pow(sum, 1.0 / n);
        const double weak = schatten_norm(
            commutator_spectrum(b, w, cfg.direction, RieszMode::periodic_multiplier, cache), n, kInf);
        row.values["collapse_sum"] = collapse;
        row.values["weak_norm"] = weak;
        row.ratio = collapse / weak;
        return row;
      });
  RatioReport rep = finish_report("collapse", run_jobs(jobs));
  const double min_growth = threshold(cfg, "min_growth", 1.3);
  const double max_band = threshold(cfg, "max_band", 3.0);
  std::map<std::string, std::vector<const RatioRow*>> by_symbol;
  for (const auto& row : rep.rows)
    if (!row.degenerate) by_symbol[row.symbol].push_back(&row);
  for (auto& [sym, rows] : by_symbol) {
    std::sort(rows.begin(), rows.end(), [](const RatioRow* a, const RatioRow* b) { return a->N < b->N; });
    double growth = kInf, lo = kInf, hi = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double weak = rows[i]->values.at("weak_norm");
      lo = std::min(lo, weak);
      hi = std::max(hi, weak);
      if (i)
        growth = std::min(growth, rows[i]->values.at("collapse_sum") / rows[i - 1]->values.at("collapse_sum"));
    }
    const double band = lo > 0.0 ? hi / lo : kInf;
    rep.constants["min_growth:" + sym] = growth;
    rep.constants["weak_band:" + sym] = band;
    rep.checks["signature:" + sym] = growth >= min_growth && band <= max_band;
  }
  return rep;
}

RatioReport exp_theorem12_critical(const ExperimentConfig& cfg, SpectrumCache* cache) {
  check_common(cfg);
  const int n = cfg.dim;
  if (n < 2) throw ConfigError("the critical experiment needs n in {2, 3}");
  std::vector<std::function<RatioRow()>> jobs;
  for (const auto& sw : sweep(cfg))
    jobs.push_back([&cfg, sw, cache, n] {
      const GridWindow win = GridWindow::unit(n, sw.N);
      const SampledFunction b = build_symbol(sw.symbol, win);
      const Weight w = build_weight(sw.weight, win);
      RatioRow row;
      row.symbol = sw.symbol.label;
      row.weight = to_string(sw.weight, n);
      row.N = sw.N;
      row.key = row_key(row.symbol, row.weight, row.N);
      for (const char* k : {"weak_norm", "sobolev", "osc_weak", "osc_over_sobolev", "osc_over_weak"}) row.values[k] = 0.0;
      if (is_constant(b)) {
        row.degenerate = true;
        return row;
      }
      const double weak = schatten_norm(
          commutator_spectrum(b, w, cfg.direction, RieszMode::periodic_multiplier, cache), n, kInf);
      const double sob = sobolev_seminorm(b);
      const double osc = lorentz_norm(oscillation_sequence(b, win, cfg.osc_alpha, cfg.osc_K), {double(n), kInf});
      row.values["weak_norm"] = weak;
      row.values["sobolev"] = sob;
      row.values["osc_weak"] = osc;
      row.values["osc_over_sobolev"] = osc / sob;
      row.values["osc_over_weak"] = osc / weak;
      row.ratio = weak / sob;
      return row;
    });
  RatioReport rep = finish_report("theorem12", run_jobs(jobs));
  for (const std::string v : {"osc_over_sobolev", "osc_over_weak"}) {
    double lo = kInf, hi = 0.0;
    for (const auto& row : rep.rows) {
      if (row.degenerate) continue;
      lo = std::min(lo, row.values.at(v));
      hi = std::max(hi, row.values.at(v));
    }
    rep.constants[v + "_min"] = std::isinf(lo) ? 0.0 : lo;
    rep.constants[v + "_max"] = hi;
  }
  return rep;
}

RatioReport exp_quantised(const ExperimentConfig& cfg, SpectrumCache* cache) {
  check_common(cfg);
  if (cfg.dim != 2) throw ConfigError("the quantised derivative experiment needs n = 2");
  std::vector<std::function<RatioRow()>> jobs;
  for (const auto& sw : sweep(cfg))
    jobs.push_back([sw, cache] {
      const GridWindow win = GridWindow::unit(2, sw.N);
      const SampledFunction f = build_symbol(sw.symbol, win);
      const Weight w = build_weight(sw.weight, win);
      RatioRow row;
      row.symbol = sw.symbol.label;
      row.weight = to_string(sw.weight, 2);
      row.N = sw.N;
      row.key = row_key(row.symbol, row.weight, row.N);
      row.values["weak_norm"] = 0.0;
      row.values["sobolev"] = 0.0;
      if (is_constant(f)) {
        row.degenerate = true;
        return row;
      }
      auto make = [&] {
        QuantisedBlocks blk = quantised_derivative_blocks(f, win, &w);
        const SingularSpectrum up = singular_values(blk.upper);
        // For a real weight the lower block is the entrywise conjugate of the upper block.
        if ((blk.lower - blk.upper.conjugate()).cwiseAbs().maxCoeff() == 0.0) {
          return merge_spectra(up, up);
        }
        blk.upper.resize(0, 0);
        return merge_spectra(up, singular_values(blk.lower));
      };
      SingularSpectrum s;
      if (cache) {
        const std::uint64_t h = hash_values(w.w.values, hash_values(f.values));
        s = cache->get("quantised|N=" + std::to_string(sw.N) + "|" + std::to_string(h), make);
      } else {
        s = make();
      }
      const double weak = schatten_norm(s, 2.0, kInf);
      const double sob = sobolev_seminorm(f);
      row.values["weak_norm"] = weak;
      row.values["sobolev"] = sob;
      row.ratio = weak / sob;
      return row;
    });
  RatioReport rep = finish_report("quantised", run_jobs(jobs));
  rep.constants["resolution_spread"] =
      group_spread(rep.rows, [](const RatioRow& r) { return r.symbol + "|" + r.weight; });
  return rep;
}

RatioReport exp_besov_equivalence(const ExperimentConfig& cfg, SpectrumCache*) {
  check_common(cfg);
  require_p_above_n(cfg);
  const std::vector<Shift> shifts = cfg.shifts.empty() ? all_shifts(cfg.dim) : cfg.shifts;
  for (const auto& s : shifts)
    if (s.dim != cfg.dim) throw ConfigError("shift dimension does not match n");
  std::vector<std::function<RatioRow()>> jobs;
  for (int N : cfg.grid_sizes)
    for (const auto& sym : cfg.resolved_symbols())
      jobs.push_back([&cfg, &shifts, sym, N] {
        const GridWindow win = GridWindow::unit(cfg.dim, N);
        const SampledFunction b = build_symbol(sym, win);
        RatioRow row;
        row.symbol = sym.label;
        row.weight = "constant:1";
        row.N = N;
        row.key = row_key(row.symbol, row.weight, row.N);
        for (const char* k : {"continuous", "dyadic_standard", "dyadic_shift_sum", "r1", "r2"}) row.values[k] = 0.0;
        if (is_constant(b)) {
          row.degenerate = true;
          return row;
        }
        const double cont = besov_continuous(b, cfg.p);
        const double d0 = besov_dyadic(b, cfg.p, Shift::zero(cfg.dim));
        double dsum = 0.0;
        for (const auto& s : shifts) dsum += besov_dyadic(b, cfg.p, s);
        row.values["continuous"] = cont;
        row.values["dyadic_standard"] = d0;
        row.values["dyadic_shift_sum"] = dsum;
        row.values["r1"] = d0 / cont;
        row.values["r2"] = cont / dsum;
        row.ratio = d0 / cont;
        return row;
      });
  RatioReport rep = finish_report("besov", run_jobs(jobs));
  double c1 = 0.0, c2 = 0.0;
  bool finite = true;
  for (const auto& row : rep.rows) {
    if (row.degenerate) continue;
    c1 = std::max(c1, row.values.at("r1"));
    c2 = std::max(c2, row.values.at("r2"));
    finite = finite && std::isfinite(row.values.at("r1")) && std::isfinite(row.values.at("r2")) &&
             row.values.at("r1") > 0.0 && row.values.at("r2") > 0.0;
  }
  rep.constants["C1"] = c1;
  rep.constants["C2"] = c2;
  auto by_symbol = [](const RatioRow& r) { return r.symbol; };
  rep.constants["refinement_spread_r1"] = group_spread(rep.rows, by_symbol, "r1");
  rep.constants["refinement_spread_r2"] = group_spread(rep.rows, by_symbol, "r2");
  rep.checks["finite"] = finite;
  return rep;
}

std::vector<std::string> experiment_names() {
  return {"besov", "collapse", "median", "quantised", "theorem11", "theorem12"};
}

RatioReport run_experiment(const ExperimentConfig& cfg, SpectrumCache* cache) {
  const std::string& e = cfg.experiment;
  if (e == "theorem11") return exp_theorem11_upper(cfg, cache);
  if (e == "median") return exp_median_lower(cfg, cache);
  if (e == "collapse") return exp_collapse(cfg, cache);
  if (e == "theorem12") return exp_theorem12_critical(cfg, cache);
  if (e == "quantised") return exp_quantised(cfg, cache);
  if (e == "besov") return exp_besov_equivalence(cfg, cache);
  throw ConfigError("unknown experiment: " + e);
}

std::vector<std::string> threshold_violations(const RatioReport& report, const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& [name, ok] : report.checks)
    if (!ok) out.push_back("check failed: " + name);
  for (const auto& [name, limit] : cfg.thresholds) {
    if (name == "min_growth" || name == "max_band") continue;
    if (name == "max_spread") {
      if (report.spread > limit) out.push_back("spread " + format_g17(report.spread) + " > " + format_g17(limit));
      continue;
    }
    if (name.rfind("max_", 0) == 0) {
      const auto it = report.constants.find(name.substr(4));
      if (it != report.constants.end() && it->second > limit)
        out.push_back(it->first + " " + format_g17(it->second) + " > " + format_g17(limit));
      continue;
    }
    if (name.rfind("min_", 0) == 0) {
      const auto it = report.constants.find(name.substr(4));
      if (it != report.constants.end() && it->second < limit)
        out.push_back(it->first + " " + format_g17(it->second) + " < " + format_g17(limit));
    }
  }
  return out;
}

}  // namespace schatten
