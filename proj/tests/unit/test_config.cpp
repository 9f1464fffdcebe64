#include <gtest/gtest.h>

#include "schatten/config.hpp"

using namespace schatten;

TEST(Config, ParsesValuesSectionsAndComments) {
  const ConfigTable t = parse_config_text(R"(
# leading comment
experiment = "theorem11"
p = 4.5   # trailing comment
[run]
grid_sizes = [16, 32]
weights = ["1", "power:0.5"]
flag = true
limit = inf
[thresholds]
max_spread = 10
)");
  EXPECT_EQ(std::get<std::string>(t.at("").at("experiment")), "theorem11");
  EXPECT_EQ(std::get<double>(t.at("").at("p")), 4.5);
  EXPECT_EQ(std::get<std::vector<double>>(t.at("run").at("grid_sizes")), (std::vector<double>{16, 32}));
  EXPECT_EQ(std::get<std::vector<std::string>>(t.at("run").at("weights")).size(), 2u);
  EXPECT_TRUE(std::get<bool>(t.at("run").at("flag")));
  EXPECT_TRUE(std::isinf(std::get<double>(t.at("run").at("limit"))));
  EXPECT_EQ(std::get<double>(t.at("thresholds").at("max_spread")), 10.0);
}

TEST(Config, RejectsMalformedText) {
  EXPECT_THROW(parse_config_text("p = 4\np = 5\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[unterminated\n"), ConfigError);
  EXPECT_THROW(parse_config_text("p 4\n"), ConfigError);
  EXPECT_THROW(parse_config_text("s = \"open\n"), ConfigError);
  EXPECT_THROW(load_config_file("/nonexistent/config.toml"), ConfigError);
}

TEST(Config, ResolvesExperimentSectionsInOrder) {
  const ConfigTable t = parse_config_text(R"(
p = 3
N = [8]
[run]
p = 5
symbols = ["gaussian", "sine:2,1"]
[theorem11]
p = 6
weight = "power:0.25"
[theorem11.thresholds]
max_spread = 4
[thresholds]
max_spread = 9
min_weight_uniformity = 0.5
)");
  const ExperimentConfig c = resolve_experiment(t, "theorem11");
  EXPECT_EQ(c.experiment, "theorem11");
  EXPECT_EQ(c.p, 6.0);
  EXPECT_EQ(c.grid_sizes, (std::vector<int>{8}));
  ASSERT_EQ(c.symbols.size(), 2u);
  EXPECT_EQ(c.symbols[1].frequencies[0], 2);
  ASSERT_EQ(c.weights.size(), 1u);
  EXPECT_EQ(c.weights[0].alpha, 0.25);
  EXPECT_EQ(c.thresholds.at("max_spread"), 4.0);
  EXPECT_EQ(c.thresholds.at("min_weight_uniformity"), 0.5);

  const ExperimentConfig m = resolve_experiment(t, "median");
  EXPECT_EQ(m.p, 5.0);
  EXPECT_EQ(m.thresholds.at("max_spread"), 9.0);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(resolve_experiment(parse_config_text("bogus = 1\n"), "besov"), ConfigError);
  EXPECT_THROW(resolve_experiment(parse_config_text("[nonsense]\np = 4\n"), "besov"), ConfigError);
  EXPECT_THROW(resolve_experiment(parse_config_text("p = \"four\"\n"), "besov"), ConfigError);
  EXPECT_THROW(resolve_experiment(parse_config_text("N = [12.5]\n"), "besov"), ConfigError);
  EXPECT_THROW(resolve_experiment(parse_config_text("symbol = \"mystery\"\n"), "besov"), ConfigError);
}

TEST(Config, ParsesShifts) {
  const Shift s = parse_shift("0,1/3", 2);
  EXPECT_EQ(s.thirds[0], 0);
  EXPECT_EQ(s.thirds[1], 1);
  EXPECT_EQ(parse_shift("2/3", 1).thirds[0], 2);
  EXPECT_THROW(parse_shift("1/2", 1), ConfigError);
  EXPECT_THROW(parse_shift("0", 2), ConfigError);
}

TEST(Config, EchoAndHashAreStable) {
  ExperimentConfig a;
  a.experiment = "besov";
  ExperimentConfig b = a;
  EXPECT_EQ(config_hash(config_to_json(a)), config_hash(config_to_json(b)));
  EXPECT_EQ(config_hash(config_to_json(a)).size(), 16u);
  b.p = 5.0;
  EXPECT_NE(config_hash(config_to_json(a)), config_hash(config_to_json(b)));
  const nlohmann::json echo = config_to_json(a);
  EXPECT_EQ(echo.at("symbols").size(), default_symbol_family(2).size());
  EXPECT_EQ(echo.at("shifts").size(), 9u);
}
