#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "schatten/operators.hpp"
#include "schatten/spectra.hpp"
#include "schatten/symbols.hpp"
#include "schatten/weights.hpp"

namespace schatten {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  int dim = 2;
  std::vector<int> grid_sizes{32};
  double p = 4.0;
  double q = 4.0;
  std::vector<WeightSpec> weights{WeightSpec{}};
  /// Empty means the default family.
  std::vector<SymbolSpec> symbols;
  /// Empty means all 3^n shifts.
  std::vector<Shift> shifts;
  std::uint64_t seed = 1;
  int direction = 1;
  std::string output;
  /// k_max values for the collapse experiment.
  std::vector<int> levels{3, 4, 5};
  double osc_alpha = 1.0;
  double osc_K = 5.0;
  /// Acceptance thresholds, e.g. max_spread, min_growth, max_band.
  std::map<std::string, double> thresholds;

  std::vector<SymbolSpec> resolved_symbols() const;
};

struct RatioRow {
  std::string key;
  std::string symbol;
  std::string weight;
  int N = 0;
  std::map<std::string, double> values;
  double ratio = 0.0;
  bool degenerate = false;
  bool exploratory = false;
};

struct RatioReport {
  std::string experiment;
  std::vector<RatioRow> rows;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double spread = 1.0;
  std::map<std::string, double> constants;
  std::map<std::string, bool> checks;

  /// Sorts rows by key and fills min, max and spread over non-degenerate rows.
  void summarize();
};

/// Spectra shared between experiments, keyed by operator content.
class SpectrumCache {
 public:
  SingularSpectrum get(const std::string& key, const std::function<SingularSpectrum()>& make);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, SingularSpectrum> entries_;
};

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed = 1469598103934665603ull);

/// Spectrum of [b, R_j] under the w inner product.
SingularSpectrum commutator_spectrum(const SampledFunction& b, const Weight& w, int j, RieszMode mode,
                                     SpectrumCache* cache = nullptr);

/// Runs jobs on up to SCHATTEN_LAB_THREADS workers (default 1).
std::vector<RatioRow> run_jobs(const std::vector<std::function<RatioRow()>>& jobs);
int harness_threads();

RatioReport exp_theorem11_upper(const ExperimentConfig& cfg, SpectrumCache* cache = nullptr);
RatioReport exp_median_lower(const ExperimentConfig& cfg, SpectrumCache* cache = nullptr);
RatioReport exp_collapse(const ExperimentConfig& cfg, SpectrumCache* cache = nullptr);
RatioReport exp_theorem12_critical(const ExperimentConfig& cfg, SpectrumCache* cache = nullptr);
RatioReport exp_quantised(const ExperimentConfig& cfg, SpectrumCache* cache = nullptr);
RatioReport exp_besov_equivalence(const ExperimentConfig& cfg, SpectrumCache* cache = nullptr);

/// Names: theorem11, median, collapse, theorem12, quantised, besov.
RatioReport run_experiment(const ExperimentConfig& cfg, SpectrumCache* cache = nullptr);
std::vector<std::string> experiment_names();

/// Human-readable descriptions of config thresholds the report violates.
std::vector<std::string> threshold_violations(const RatioReport& report, const ExperimentConfig& cfg);

}  // namespace schatten
