#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "mdcpp/scenario.hpp"

using namespace mdcpp;

namespace {

const char* kMinimal = R"({
  "grid": {"width_cells": 20, "height_cells": 20, "cell_size": 10.0},
  "gaussian_components": [{"center": [5, 5], "sigma": 3.0, "amplitude": 1.0}],
  "robots": [{"id": 1, "start_cell": [0, 0], "speed": {"v_max": 0.3, "v_min": 0.06}}]
})";

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text, "test.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal file fills defaults") {
  const auto cfg = parse_scenario(kMinimal);
  CHECK(cfg.grid.cell_count() == 400);
  CHECK(cfg.estimator.theta == 0.6);
  CHECK(cfg.estimator.sigma_lo == 2.5);
  CHECK(cfg.estimator.sigma_hi == 5.0);
  CHECK(cfg.estimator.sigma_step == doctest::Approx(0.1));
  CHECK(cfg.estimator.k_min == 1);
  CHECK(cfg.estimator.k_max == 5);
  CHECK(cfg.estimator.radius == 5.0);
  CHECK(cfg.estimator.swd_projections == 50);
  CHECK(cfg.n0 == 2);
  CHECK(cfg.dt == 1.0);
  CHECK(cfg.lloyd_eps == doctest::Approx(0.1));
  CHECK(cfg.lloyd_max_iters == 100);
  CHECK_FALSE(cfg.network.comm_range.has_value());
  CHECK(cfg.robots.size() == 1);
  CHECK(cfg.robots[0].alpha == 1.0);
  CHECK(cfg.robots[0].noise_sigma == doctest::Approx(0.05));
  CHECK(cfg.speed_model.jitter_lo == 0.5);
  CHECK(cfg.speed_model.jitter_hi == 1.5);
}

TEST_CASE("grid defaults to the 20 by 20 layout of 10 m cells") {
  const auto cfg = parse_scenario(R"({"robots": [{"id": 1, "start_cell": [0, 0],
    "speed": {"v_max": 1.0, "v_min": 0.5}}]})");
  CHECK(cfg.grid.width_cells == 20);
  CHECK(cfg.grid.height_cells == 20);
  CHECK(cfg.grid.cell_size == 10.0);
}

TEST_CASE("large-difference two-center preset") {
  const auto cfg = preset("ld_2c");
  const std::vector<std::pair<double, double>> speeds{{0.05, 0.008}, {0.15, 0.030}, {0.30, 0.060}, {0.40, 0.080}};
  REQUIRE(cfg.robots.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(cfg.robots[i].speed.v_max == speeds[i].first);
    CHECK(*cfg.robots[i].speed.v_min == speeds[i].second);
  }
  REQUIRE(cfg.components.size() == 2);
  CHECK(cfg.components[0].center == Point{5.0, 5.0});
  CHECK(cfg.components[1].center == Point{15.0, 15.0});
  CHECK(parse_scenario(serialize_scenario(cfg)) == cfg);
}

TEST_CASE("table1 preset speeds") {
  const auto cfg = preset("table1");
  CHECK(cfg.speed_model.kind == SpeedKind::ThreeSpeed);
  const double table[4][3] = {{3.0, 1.0, 0.1}, {2.0, 0.8, 0.12}, {5.0, 0.6, 0.08}, {4.0, 0.12, 0.06}};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(cfg.robots[i].speed.v_max == table[i][0]);
    CHECK(*cfg.robots[i].speed.v_det == table[i][1]);
    CHECK(*cfg.robots[i].speed.v_int == table[i][2]);
  }
}

TEST_CASE("every preset round-trips and matches its shipped file") {
  for (const auto& name : preset_names()) {
    const auto cfg = preset(name);
    CHECK(parse_scenario(serialize_scenario(cfg)) == cfg);
    CHECK(serialize_scenario(parse_scenario(serialize_scenario(cfg))) == serialize_scenario(cfg));
    const std::string path = std::string(MDCPP_SOURCE_DIR) + "/scenarios/" + name + ".json";
    CHECK(load_scenario(path) == cfg);
    CHECK(read_file(path) == serialize_scenario(cfg));
    CHECK(load_scenario("preset:" + name) == cfg);
  }
  CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("random configs round-trip") {
  Rng rng(17);
  std::uniform_int_distribution<int> side(1, 30);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int t = 0; t < 100; ++t) {
    ScenarioConfig cfg;
    cfg.name = "random_" + std::to_string(t);
    cfg.grid = {side(rng), side(rng), u(rng), {u(rng), -u(rng)}};
    cfg.components = {{{u(rng), u(rng)}, u(rng), u(rng)}};
    cfg.speed_model.kind = t % 2 ? SpeedKind::ThreeSpeed : SpeedKind::Interpolated;
    cfg.targets.mode = t % 3 ? TargetMode::Threshold : TargetMode::Bernoulli;
    for (int i = 0; i < 1 + t % 4; ++i) {
      RobotConfig r;
      r.id = 10 * i + t;
      r.start_col = 0;
      r.start_row = 0;
      const double v = u(rng) + 2.0;
      r.speed = {v, v / 2, v / 4, v / 3};
      r.alpha = u(rng);
      r.noise_sigma = u(rng) / 10;
      cfg.robots.push_back(r);
    }
    if (t % 2) cfg.network = NetworkConfig::limited(u(rng));
    cfg.seed = static_cast<std::uint64_t>(t) * 1234567;
    cfg.strategy = all_strategies()[static_cast<std::size_t>(t) % 3];
    cfg.dt = u(rng);
    cfg.validate();
    CHECK(parse_scenario(serialize_scenario(cfg)) == cfg);
  }
}

TEST_CASE("semantic errors name the field") {
  std::string dup = kMinimal;
  dup.replace(dup.find("\"robots\": ["), 11,
              "\"robots\": [{\"id\": 1, \"start_cell\": [1, 1], \"speed\": {\"v_max\": 1, \"v_min\": 0.5}}, ");
  CHECK(error_of(dup).find("robots[1].id") != std::string::npos);

  std::string outside = kMinimal;
  outside.replace(outside.find("[0, 0]"), 6, "[20, 0]");
  CHECK(error_of(outside).find("robots[0].start_cell") != std::string::npos);

  std::string unknown = kMinimal;
  unknown.replace(unknown.find("\"grid\""), 6, "\"gird\": 1, \"grid\"");
  CHECK(error_of(unknown).find("gird") != std::string::npos);

  std::string bad_sigma = kMinimal;
  bad_sigma.replace(bad_sigma.find("\"sigma\": 3.0"), 12, "\"sigma\": -3.0");
  CHECK(error_of(bad_sigma).find("gaussian_components[0].sigma") != std::string::npos);

  std::string bad_speed = kMinimal;
  bad_speed.replace(bad_speed.find("\"v_min\": 0.06"), 13, "\"v_min\": 0.6");
  CHECK(error_of(bad_speed).find("robots[0].speed") != std::string::npos);

  std::string bad_range = kMinimal;
  bad_range.replace(bad_range.find("\"robots\""), 8, "\"comm_range\": \"far\", \"robots\"");
  CHECK(error_of(bad_range).find("comm_range") != std::string::npos);

  std::string bad_strategy = kMinimal;
  bad_strategy.replace(bad_strategy.find("\"robots\""), 8, "\"strategy\": \"greedy\", \"robots\"");
  CHECK(error_of(bad_strategy).find("strategy") != std::string::npos);
}

TEST_CASE("syntax errors report the position") {
  const auto msg = error_of("{\n  \"grid\": {\"width_cells\": 20,,}\n}");
  CHECK(msg.find("test.json") != std::string::npos);
  CHECK(msg.find("line 2") != std::string::npos);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ConfigError);
}

TEST_CASE("unit conversion") {
  const auto cfg = preset("ld_2c");
  const auto m = cfg.components_in_meters();
  CHECK(m[0].center == Point{50.0, 50.0});
  CHECK(m[0].sigma == 30.0);
  const auto p = cfg.estimator_params();
  CHECK(p.radius == 50.0);
  CHECK(p.sigma_grid.front() == doctest::Approx(25.0));
  CHECK(p.sigma_grid.back() == doctest::Approx(50.0));
  CHECK(p.sigma_grid.size() == 26);
}

TEST_CASE("strategy names") {
  for (auto s : all_strategies()) CHECK(parse_strategy(to_string(s)) == s);
  CHECK(to_string(Strategy::DynamicNoPrediction) == "dynamic");
  CHECK_THROWS(parse_strategy("bayes"));
}
