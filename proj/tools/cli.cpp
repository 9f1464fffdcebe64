#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "schatten/config.hpp"
#include "schatten/function_spaces.hpp"
#include "schatten/haar.hpp"
#include "schatten/harness.hpp"
#include "schatten/report_io.hpp"

namespace schatten::cli {

namespace {

using nlohmann::json;

struct GridOptions {
  int n = 2;
  int N = 32;
  int k_min = -1;
  int k_max = -1;
};

void add_grid(CLI::App* sub, GridOptions& g) {
  sub->add_option("--n", g.n, "dimension (1, 2 or 3)")->check(CLI::Range(1, 3));
  sub->add_option("--N", g.N, "samples per side (power of two)");
  sub->add_option("--kmin", g.k_min, "coarsest level");
  sub->add_option("--kmax", g.k_max, "finest level");
}

GridWindow make_window(const GridOptions& g) {
  GridWindow win = GridWindow::unit(g.n, g.N);
  if (g.k_min >= 0) win.k_min = g.k_min;
  if (g.k_max >= 0) win.k_max = g.k_max;
  try {
    win.validate();
  } catch (const GridError& e) {
    throw ConfigError(e.what());
  }
  return win;
}

json grid_echo(const GridWindow& win) {
  return {{"n", win.dim}, {"N", win.samples}, {"k_min", win.k_min}, {"k_max", win.k_max}};
}

json num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

OutputStamp stamp_for(const json& echo) { return OutputStamp{kToolVersion, config_hash(echo)}; }

/// JSON documents carry version, config hash and the resolved invocation.
json stamped(json body, const json& echo) {
  body["tool_version"] = kToolVersion;
  body["config_hash"] = config_hash(echo);
  body["config"] = echo;
  return body;
}

void emit_json(const json& doc, const std::string& path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) out << text;
  else write_file_atomic(path, text);
}

std::string with_ext(const std::string& path, const std::string& ext) {
  return std::filesystem::path(path).replace_extension(ext).string();
}

SampledFunction make_symbol(const std::string& text, const GridWindow& win) {
  try {
    return symbol_library(parse_symbol(text, win.dim), win);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Weight make_weight_arg(const std::string& text, const GridWindow& win) {
  try {
    return make_weight(parse_weight_spec(text), win);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for Schatten class commutators"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kToolVersion);

  GridOptions grid;
  std::string symbol = "gaussian", weight = "1", shift_text, out_path, op = "commutator", mode = "periodic";
  std::string config_path, experiment;
  std::vector<std::string> inputs;
  double p = 4.0, q = 0.0, reference = 0.0;
  int j = 1;
  std::string matrix_path;

  auto* grid_info = app.add_subcommand("grid-info", "dyadic cube counts and Whitney pairs");
  add_grid(grid_info, grid);
  grid_info->add_option("--shift", shift_text, "shift such as 0,1/3");
  grid_info->add_option("--out", out_path, "JSON output path");

  auto* haar = app.add_subcommand("haar", "Haar coefficients of a symbol");
  add_grid(haar, grid);
  haar->add_option("--symbol", symbol, "symbol spec");
  haar->add_option("--shift", shift_text, "shift such as 0,1/3");
  haar->add_option("--out", out_path, "CSV output path (JSON sidecar next to it)");

  auto* besov = app.add_subcommand("besov", "continuous and dyadic Besov norms");
  add_grid(besov, grid);
  besov->add_option("--symbol", symbol, "symbol spec");
  besov->add_option("--p", p, "exponent");
  besov->add_option("--weight", weight, "weight spec for the weighted dyadic norm");
  besov->add_option("--out", out_path, "JSON output path");

  auto* a2 = app.add_subcommand("a2", "A2 constant, reverse Hoelder index and doubling ratio");
  add_grid(a2, grid);
  a2->add_option("--weight", weight, "weight spec");
  a2->add_option("--out", out_path, "JSON output path");

  auto* spectrum = app.add_subcommand("spectrum", "singular values of an operator");
  add_grid(spectrum, grid);
  spectrum->add_option("--op", op, "commutator | riesz | quantised")
      ->check(CLI::IsMember({"commutator", "riesz", "quantised"}));
  spectrum->add_option("--j", j, "Riesz direction (1-based)");
  spectrum->add_option("--mode", mode, "periodic | kernel")->check(CLI::IsMember({"periodic", "kernel"}));
  spectrum->add_option("--symbol", symbol, "symbol spec");
  spectrum->add_option("--weight", weight, "weight spec");
  spectrum->add_option("--p", p, "Schatten exponent");
  spectrum->add_option("--q", q, "Lorentz exponent (0 means q = p)");
  spectrum->add_option("--reference", reference, "reference slope exponent (default 1/n)");
  spectrum->add_option("--matrix", matrix_path, "also save the operator as OPMX");
  spectrum->add_option("--out", out_path, "output prefix")->required();

  auto* verify = app.add_subcommand("verify", "run an experiment and check its thresholds");
  verify->add_option("experiment", experiment, "theorem11 | median | collapse | theorem12 | quantised | besov")
      ->required()
      ->check(CLI::IsMember(experiment_names()));
  verify->add_option("--config", config_path, "config file");
  verify->add_option("--out", out_path, "output prefix (CSV + JSON)");

  auto* report = app.add_subcommand("report", "summarize JSON reports as a Markdown table");
  report->add_option("inputs", inputs, "report JSON files")->required()->check(CLI::ExistingFile);
  report->add_option("--out", out_path, "Markdown output path");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*grid_info) {
      const GridWindow win = make_window(grid);
      const Shift shift = shift_text.empty() ? Shift::zero(win.dim) : parse_shift(shift_text, win.dim);
      json echo = grid_echo(win);
      echo["shift"] = to_string(shift);
      json levels = json::object();
      const auto cubes = enumerate_cubes(win, shift);
      std::map<int, std::pair<int, int>> counts;
      for (const auto& c : cubes) ++counts[c.level].first;
      for (const auto& c : interior_cubes(win, shift)) ++counts[c.level].second;
      for (const auto& [k, c] : counts) levels[std::to_string(k)] = {{"cubes", c.first}, {"interior", c.second}};
      json body = {{"levels", levels}, {"total_cubes", cubes.size()}};
      if (shift.is_zero()) {
        const WhitneyDecomposition wd = whitney_pairs(win);
        body["whitney"] = {{"pairs", wd.pairs.size()},
                           {"max_partners", wd.max_partners},
                           {"first_level", wd.first_level},
                           {"last_level", wd.last_level}};
      }
      emit_json(stamped(body, echo), out_path, out);
      return kExitOk;
    }

    if (*haar) {
      const GridWindow win = make_window(grid);
      const Shift shift = shift_text.empty() ? Shift::zero(win.dim) : parse_shift(shift_text, win.dim);
      const SampledFunction b = make_symbol(symbol, win);
      const HaarCoefficients c = haar_transform(b, shift);
      json echo = grid_echo(win);
      echo["symbol"] = symbol;
      echo["shift"] = to_string(shift);
      std::ostringstream csv;
      write_haar_csv(c, csv);
      json body = {{"coefficients", c.entries.size()},
                   {"path", c.path == TransformPath::pyramid ? "pyramid" : "direct"},
                   {"residual_energy", c.residual_energy}};
      if (out_path.empty()) {
        out << csv.str();
      } else {
        write_file_atomic(out_path, csv.str());
        write_file_atomic(with_ext(out_path, ".json"), stamped(body, echo).dump(2) + "\n");
      }
      return kExitOk;
    }

    if (*besov) {
      if (!(p > 0.0)) throw ConfigError("p must be positive");
      const GridWindow win = make_window(grid);
      const SampledFunction b = make_symbol(symbol, win);
      const Weight w = make_weight_arg(weight, win);
      json echo = grid_echo(win);
      echo["symbol"] = symbol;
      echo["p"] = p;
      echo["weight"] = to_string(w.spec, win.dim);
      json shifts = json::object();
      double sum = 0.0;
      for (const auto& s : all_shifts(win.dim)) {
        const double v = besov_dyadic(b, p, s, win);
        shifts[to_string(s)] = v;
        sum += v;
      }
      json body = {{"continuous", besov_continuous(b, p)},
                   {"dyadic", besov_dyadic(b, p, Shift::zero(win.dim), win)},
                   {"dyadic_by_shift", shifts},
                   {"dyadic_shift_sum", sum},
                   {"dyadic_weighted", besov_dyadic_weighted(b, w, p, Shift::zero(win.dim), win)}};
      emit_json(stamped(body, echo), out_path, out);
      return kExitOk;
    }

    if (*a2) {
      const GridWindow win = make_window(grid);
      const Weight w = make_weight_arg(weight, win);
      json echo = grid_echo(win);
      echo["weight"] = to_string(w.spec, win.dim);
      const ReverseHolderResult rh = reverse_holder_index(w, win, default_sigma_ladder());
      json table = json::array();
      for (const auto& [s, c] : rh.table) table.push_back({{"sigma", s}, {"constant", c}});
      json body = {{"a2", a2_constant(w, win)},
                   {"reverse_holder", {{"sigma", rh.sigma}, {"constant", rh.constant}, {"table", table}}},
                   {"doubling_ratio_3", doubling_ratio(w, 3.0, win)},
                   {"clamp_value", w.clamp_value}};
      emit_json(stamped(body, echo), out_path, out);
      return kExitOk;
    }

    if (*spectrum) {
      const GridWindow win = make_window(grid);
      if (j < 1 || j > win.dim) throw ConfigError("--j must lie in 1..n");
      const double qq = q > 0.0 ? q : p;
      const double ref = reference > 0.0 ? reference : 1.0 / win.dim;
      const Weight w = make_weight_arg(weight, win);
      json echo = grid_echo(win);
      echo["op"] = op;
      echo["j"] = j;
      echo["mode"] = mode;
      echo["symbol"] = symbol;
      echo["weight"] = to_string(w.spec, win.dim);
      echo["p"] = p;
      echo["q"] = qq;
      echo["reference"] = ref;
      const RieszMode rm = parse_riesz_mode(mode);
      SingularSpectrum s;
      if (op == "riesz") {
        RealOperator T = riesz_matrix(j, win, rm);
        T.ip_weight = w;
        if (!matrix_path.empty()) write_opmx(matrix_path, conjugate_by_weight(T, w).entries);
        s = singular_values(T);
      } else if (op == "commutator") {
        const SampledFunction b = make_symbol(symbol, win);
        RealOperator T = commutator(b, riesz_matrix(j, win, rm));
        T.ip_weight = w;
        if (!matrix_path.empty()) write_opmx(matrix_path, conjugate_by_weight(T, w).entries);
        s = singular_values(T);
      } else {
        const SampledFunction f = make_symbol(symbol, win);
        const ComplexOperator T = quantised_derivative(f, win, make_gamma_set(win.dim), &w);
        if (!matrix_path.empty()) write_opmx(matrix_path, T.entries);
        s = singular_values(T.entries);
      }
      if (!matrix_path.empty()) {
        json side = {{"format", "OPMX"}, {"operator", op}, {"mode", mode}, {"window", grid_echo(win)},
                     {"weight", to_string(w.spec, win.dim)}, {"conjugated", op != "quantised"}};
        write_file_atomic(matrix_path + ".json", stamped(side, echo).dump(2) + "\n");
      }
      const OutputStamp st = stamp_for(echo);
      write_file_atomic(out_path + ".csv", spectrum_csv(s, st));
      if (s.numerical_rank > 0) write_file_atomic(out_path + ".svg", spectrum_svg(s, ref, st));
      const SchattenValue v = schatten_functional(s, p, qq);
      json body = {{"schatten", {{"p", p}, {"q", num(qq)}, {"value", v.value}, {"argmax_k", v.argmax_k}}},
                   {"weak", num(schatten_norm(s, win.dim, kInf))},
                   {"s1", s.values.empty() ? 0.0 : s.values.front()},
                   {"numerical_rank", s.numerical_rank},
                   {"source_dim", s.source_dim}};
      write_file_atomic(out_path + ".json", stamped(body, echo).dump(2) + "\n");
      return kExitOk;
    }

    if (*verify) {
      const ConfigTable table = config_path.empty() ? ConfigTable{} : load_config_file(config_path);
      ExperimentConfig cfg = resolve_experiment(table, experiment);
      if (!out_path.empty()) cfg.output = out_path;
      SpectrumCache cache;
      const RatioReport rep = run_experiment(cfg, &cache);
      const json echo = config_to_json(cfg);
      const OutputStamp st = stamp_for(echo);
      const std::string csv = report_csv(rep, st);
      json doc = report_json(rep, st, echo);
      const auto violations = threshold_violations(rep, cfg);
      doc["violations"] = violations;
      if (cfg.output.empty()) {
        out << csv;
        out << doc.dump(2) << "\n";
      } else {
        write_file_atomic(cfg.output + ".csv", csv);
        write_file_atomic(cfg.output + ".json", doc.dump(2) + "\n");
      }
      for (const auto& v : violations) err << "violation: " << v << "\n";
      return violations.empty() ? kExitOk : kExitViolation;
    }

    if (*report) {
      std::ostringstream md;
      md << "| experiment | rows | min ratio | max ratio | spread | failed checks |\n";
      md << "|---|---|---|---|---|---|\n";
      for (const auto& path : inputs) {
        json doc;
        try {
          doc = json::parse(read_file(path));
        } catch (const json::exception& e) {
          throw ConfigError(path + ": " + e.what());
        }
        const json& s = doc.at("summary");
        std::string failed;
        const json checks = doc.value("checks", json::object());
        for (const auto& [k, v] : checks.items())
          if (!v.get<bool>()) failed += (failed.empty() ? "" : " ") + k;
        md << "| " << doc.value("experiment", "?") << " | " << s.value("rows", 0) << " | " << s.at("min_ratio").dump()
           << " | " << s.at("max_ratio").dump() << " | " << s.at("spread").dump() << " | "
           << (failed.empty() ? "none" : failed) << " |\n";
      }
      if (out_path.empty()) out << md.str();
      else write_file_atomic(out_path, md.str());
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GridError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace schatten::cli
