#include "schatten/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace schatten {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Drops a trailing # comment outside quotes.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::string fail_at(int line, const std::string& msg) { return "config line " + std::to_string(line) + ": " + msg; }

bool parse_number(const std::string& s, double& out) {
  if (s == "inf" || s == "+inf") {
    out = kInf;
    return true;
  }
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::logic_error&) {
    return false;
  }
  return used == s.size();
}

std::string unquote(const std::string& s, int line) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') throw ConfigError(fail_at(line, "expected a quoted string"));
  const std::string body = s.substr(1, s.size() - 2);
  if (body.find('"') != std::string::npos) throw ConfigError(fail_at(line, "embedded quote"));
  return body;
}

std::vector<std::string> split_items(const std::string& s, int line) {
  std::vector<std::string> items;
  std::string cur;
  bool quoted = false;
  for (char c : s) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ConfigError(fail_at(line, "unterminated string"));
  if (!trim(cur).empty() || !items.empty()) items.push_back(trim(cur));
  return items;
}

ConfigValue parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError(fail_at(line, "missing value"));
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '"') return unquote(s, line);
  if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError(fail_at(line, "unterminated array"));
    const auto items = split_items(s.substr(1, s.size() - 2), line);
    if (items.empty()) return std::vector<double>{};
    if (items.front().front() == '"') {
      std::vector<std::string> out;
      for (const auto& it : items) out.push_back(unquote(it, line));
      return out;
    }
    std::vector<double> out;
    for (const auto& it : items) {
      double v = 0.0;
      if (!parse_number(it, v)) throw ConfigError(fail_at(line, "bad number in array: " + it));
      out.push_back(v);
    }
    return out;
  }
  double v = 0.0;
  if (!parse_number(s, v)) throw ConfigError(fail_at(line, "bad value: " + s));
  return v;
}

double as_number(const ConfigValue& v, const std::string& key) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw ConfigError("key " + key + " expects a number");
}

int as_int(const ConfigValue& v, const std::string& key) {
  const double d = as_number(v, key);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError("key " + key + " expects an integer");
  return static_cast<int>(d);
}

std::string as_string(const ConfigValue& v, const std::string& key) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw ConfigError("key " + key + " expects a string");
}

std::vector<int> as_int_list(const ConfigValue& v, const std::string& key) {
  std::vector<int> out;
  if (std::holds_alternative<double>(v)) return {as_int(v, key)};
  const auto* list = std::get_if<std::vector<double>>(&v);
  if (!list) throw ConfigError("key " + key + " expects a list of integers");
  for (double d : *list) out.push_back(as_int(d, key));
  return out;
}

std::vector<std::string> as_string_list(const ConfigValue& v, const std::string& key) {
  if (const auto* s = std::get_if<std::string>(&v)) return {*s};
  if (const auto* list = std::get_if<std::vector<std::string>>(&v)) return *list;
  if (const auto* empty = std::get_if<std::vector<double>>(&v); empty && empty->empty()) return {};
  throw ConfigError("key " + key + " expects a list of strings");
}

void apply(ExperimentConfig& cfg, const std::map<std::string, ConfigValue>& section,
           std::vector<std::string>& symbol_texts, std::vector<std::string>& shift_texts) {
  for (const auto& [key, v] : section) {
    if (key == "experiment") cfg.experiment = as_string(v, key);
    else if (key == "dim" || key == "n") cfg.dim = as_int(v, key);
    else if (key == "grid_sizes" || key == "N") cfg.grid_sizes = as_int_list(v, key);
    else if (key == "p") cfg.p = as_number(v, key);
    else if (key == "q") cfg.q = as_number(v, key);
    else if (key == "weights" || key == "weight") {
      cfg.weights.clear();
      for (const auto& s : as_string_list(v, key)) {
        try {
          cfg.weights.push_back(parse_weight_spec(s));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
    } else if (key == "symbols" || key == "symbol") symbol_texts = as_string_list(v, key);
    else if (key == "shifts") shift_texts = as_string_list(v, key);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int(v, key));
    else if (key == "direction" || key == "j") cfg.direction = as_int(v, key);
    else if (key == "output") cfg.output = as_string(v, key);
    else if (key == "levels") cfg.levels = as_int_list(v, key);
    else if (key == "osc_alpha") cfg.osc_alpha = as_number(v, key);
    else if (key == "osc_K") cfg.osc_K = as_number(v, key);
    else throw ConfigError("unknown config key: " + key);
  }
}

}  // namespace

ConfigTable parse_config_text(const std::string& text) {
  ConfigTable table;
  table[""];
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[' && s.find('=') == std::string::npos) {
      if (s.back() != ']') throw ConfigError(fail_at(line, "bad section header"));
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError(fail_at(line, "empty section name"));
      table[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(fail_at(line, "expected key = value"));
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError(fail_at(line, "empty key"));
    auto& sec = table[section];
    if (sec.count(key)) throw ConfigError(fail_at(line, "duplicate key " + key));
    sec[key] = parse_value(s.substr(eq + 1), line);
  }
  return table;
}

ConfigTable load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Shift parse_shift(const std::string& text, int dim) {
  std::vector<int> thirds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item == "0") thirds.push_back(0);
    else if (item == "1/3") thirds.push_back(1);
    else if (item == "2/3") thirds.push_back(2);
    else throw ConfigError("shift entries must be 0, 1/3 or 2/3: " + text);
  }
  if (static_cast<int>(thirds.size()) != dim) throw ConfigError("shift has the wrong dimension: " + text);
  return Shift::from_thirds(dim, thirds);
}

ExperimentConfig resolve_experiment(const ConfigTable& table, const std::string& experiment) {
  ExperimentConfig cfg;
  std::vector<std::string> symbol_texts, shift_texts;
  std::vector<std::string> thresholds_sections{"thresholds"};
  const auto top = table.find("");
  if (top != table.end()) apply(cfg, top->second, symbol_texts, shift_texts);
  if (!experiment.empty()) cfg.experiment = experiment;
  for (const auto& [name, sec] : table) {
    if (name.empty() || name == "thresholds" || name.find('.') != std::string::npos) continue;
    if (name != cfg.experiment && name != "run") {
      const auto names = experiment_names();
      if (std::find(names.begin(), names.end(), name) == names.end())
        throw ConfigError("unknown config section: " + name);
    }
  }
  if (const auto run = table.find("run"); run != table.end()) apply(cfg, run->second, symbol_texts, shift_texts);
  if (const auto own = table.find(cfg.experiment); own != table.end()) apply(cfg, own->second, symbol_texts, shift_texts);
  thresholds_sections.push_back(cfg.experiment + ".thresholds");
  for (const auto& name : thresholds_sections) {
    const auto it = table.find(name);
    if (it == table.end()) continue;
    for (const auto& [key, v] : it->second) cfg.thresholds[key] = as_number(v, key);
  }
  if (cfg.dim < 1 || cfg.dim > kMaxDim) throw ConfigError("dimension must be 1, 2 or 3");
  for (const auto& s : symbol_texts) {
    try {
      cfg.symbols.push_back(parse_symbol(s, cfg.dim));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  for (const auto& s : shift_texts) cfg.shifts.push_back(parse_shift(s, cfg.dim));
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  using nlohmann::json;
  auto num = [](double v) -> json { return std::isinf(v) ? json("inf") : json(v); };
  json j;
  j["experiment"] = cfg.experiment;
  j["dim"] = cfg.dim;
  j["grid_sizes"] = cfg.grid_sizes;
  j["p"] = num(cfg.p);
  j["q"] = num(cfg.q);
  json weights = json::array();
  for (const auto& w : cfg.weights) weights.push_back(to_string(w, cfg.dim));
  j["weights"] = weights;
  json symbols = json::array();
  for (const auto& s : cfg.resolved_symbols()) {
    json o;
    o["label"] = s.label;
    o["kind"] = kind_name(s.kind);
    o["amplitude"] = s.amplitude;
    o["offset"] = s.offset;
    switch (s.kind) {
      case SymbolSpec::Kind::gaussian_bump:
        o["width"] = s.width;
        o["center"] = std::vector<double>(s.center.begin(), s.center.begin() + cfg.dim);
        break;
      case SymbolSpec::Kind::power:
        o["beta"] = s.beta;
        o["radius"] = s.radius;
        o["center"] = std::vector<double>(s.center.begin(), s.center.begin() + cfg.dim);
        break;
      case SymbolSpec::Kind::sine_product:
        o["frequencies"] = std::vector<int>(s.frequencies.begin(), s.frequencies.begin() + cfg.dim);
        break;
      case SymbolSpec::Kind::haar_random:
        o["decay"] = s.decay;
        o["depth"] = s.depth;
        o["seed"] = s.seed;
        break;
      case SymbolSpec::Kind::linear:
        o["axis"] = s.axis;
        o["center"] = std::vector<double>(s.center.begin(), s.center.begin() + cfg.dim);
        break;
      case SymbolSpec::Kind::constant:
        break;
    }
    symbols.push_back(o);
  }
  j["symbols"] = symbols;
  json shifts = json::array();
  for (const auto& s : cfg.shifts.empty() ? all_shifts(cfg.dim) : cfg.shifts) shifts.push_back(to_string(s));
  j["shifts"] = shifts;
  j["seed"] = cfg.seed;
  j["direction"] = cfg.direction;
  j["output"] = cfg.output;
  j["levels"] = cfg.levels;
  j["osc_alpha"] = cfg.osc_alpha;
  j["osc_K"] = cfg.osc_K;
  json th = json::object();
  for (const auto& [k, v] : cfg.thresholds) th[k] = num(v);
  j["thresholds"] = th;
  return j;
}

std::string config_hash(const nlohmann::json& echo) {
  const std::string text = echo.dump();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text.data(), text.size())));
  return buf;
}

}  // namespace schatten
