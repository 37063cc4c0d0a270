#include "mdcpp/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mdcpp {

using Json = nlohmann::ordered_json;

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Mdcpp: return "mdcpp";
    case Strategy::DynamicNoPrediction: return "dynamic";
    case Strategy::Sweeping: return "sweeping";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "mdcpp") return Strategy::Mdcpp;
  if (name == "dynamic") return Strategy::DynamicNoPrediction;
  if (name == "sweeping") return Strategy::Sweeping;
  throw std::invalid_argument("unknown strategy '" + name + "' (expected mdcpp, dynamic or sweeping)");
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> all{Strategy::Mdcpp, Strategy::DynamicNoPrediction, Strategy::Sweeping};
  return all;
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) { throw ConfigError(field + ": " + why); };
  if (grid.width_cells <= 0) fail("grid.width_cells", "must be positive");
  if (grid.height_cells <= 0) fail("grid.height_cells", "must be positive");
  if (!(grid.cell_size > 0.0)) fail("grid.cell_size", "must be positive");
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto field = "gaussian_components[" + std::to_string(k) + "]";
    if (!(components[k].sigma > 0.0)) fail(field + ".sigma", "must be positive");
    if (!(components[k].amplitude > 0.0)) fail(field + ".amplitude", "must be positive");
  }
  if (targets.threshold < 0.0 || targets.threshold > 1.0) fail("targets.threshold", "must lie in [0, 1]");
  if (!(speed_model.jitter_lo > 0.0) || speed_model.jitter_hi < speed_model.jitter_lo) {
    fail("speed_model.jitter", "need 0 < lo <= hi");
  }
  if (robots.empty()) fail("robots", "at least one robot is required");
  std::set<RobotId> ids;
  for (std::size_t k = 0; k < robots.size(); ++k) {
    const auto& r = robots[k];
    const auto field = "robots[" + std::to_string(k) + "]";
    if (!ids.insert(r.id).second) fail(field + ".id", "duplicate robot id " + std::to_string(r.id));
    if (!grid.contains_cell(r.start_col, r.start_row)) fail(field + ".start_cell", "outside the grid");
    if (!(r.alpha > 0.0)) fail(field + ".alpha", "must be positive");
    if (r.noise_sigma < 0.0) fail(field + ".noise_sigma", "must be non-negative");
    if (!(r.speed.v_max > 0.0)) fail(field + ".speed.v_max", "must be positive");
    if (speed_model.kind == SpeedKind::ThreeSpeed) {
      if (!r.speed.v_det || !r.speed.v_int) fail(field + ".speed", "three_speed model needs v_det and v_int");
      if (!(*r.speed.v_int > 0.0) || *r.speed.v_int > *r.speed.v_det || *r.speed.v_det > r.speed.v_max) {
        fail(field + ".speed", "need 0 < v_int <= v_det <= v_max");
      }
    } else {
      if (!r.speed.v_min) fail(field + ".speed", "interpolated model needs v_min");
      if (!(*r.speed.v_min > 0.0) || *r.speed.v_min > r.speed.v_max) fail(field + ".speed", "need 0 < v_min <= v_max");
    }
  }
  if (network.comm_range && !(*network.comm_range > 0.0)) fail("comm_range", "must be positive or \"unlimited\"");
  if (n0 < 1) fail("n0", "must be at least 1");
  const auto& e = estimator;
  if (e.k_min < 1 || e.k_max < e.k_min) fail("estimator.k_range", "need 1 <= min <= max");
  if (!(e.radius > 0.0)) fail("estimator.d", "must be positive");
  if (!(e.sigma_lo > 0.0) || e.sigma_hi < e.sigma_lo || !(e.sigma_step > 0.0)) {
    fail("estimator.sigma_grid", "need 0 < lo <= hi and step > 0");
  }
  if (e.swd_projections < 1) fail("estimator.swd_projections", "must be at least 1");
  if (e.prior_density < 0.0) fail("estimator.prior_density", "must be non-negative");
  if (!(dt > 0.0)) fail("dt", "must be positive");
  if (!(max_sim_time > 0.0)) fail("max_sim_time", "must be positive");
  if (!(lloyd_eps > 0.0)) fail("lloyd.eps_s", "must be positive");
  if (lloyd_max_iters < 1) fail("lloyd.max_iters", "must be at least 1");
}

std::vector<GaussianComponent> ScenarioConfig::components_in_meters() const {
  std::vector<GaussianComponent> out;
  for (const auto& c : components) {
    out.push_back({grid.origin + c.center * grid.cell_size, c.sigma * grid.cell_size, c.amplitude});
  }
  return out;
}

EstimatorParams ScenarioConfig::estimator_params() const {
  EstimatorParams p;
  p.threshold = estimator.theta;
  p.k_min = estimator.k_min;
  p.k_max = estimator.k_max;
  p.radius = estimator.radius * grid.cell_size;
  for (double s : make_sigma_grid(estimator.sigma_lo, estimator.sigma_hi, estimator.sigma_step)) {
    p.sigma_grid.push_back(s * grid.cell_size);
  }
  p.swd_projections = estimator.swd_projections;
  p.prior_density = estimator.prior_density;
  return p;
}

namespace {

// Field reader that names the JSON path in every error and rejects unknown
// keys.
class Reader {
 public:
  Reader(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!obj_.contains(key)) return fallback;
    try {
      return obj_.at(key).get<T>();
    } catch (const Json::exception&) {
      throw ConfigError(field(key) + ": wrong type");
    }
  }
  template <typename T>
  std::optional<T> optional(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) return std::nullopt;
    return get<T>(key, T{});
  }
  bool has(const std::string& key) const { return obj_.contains(key); }
  const Json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) throw ConfigError(field(key) + ": unknown field");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }
  const Json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

Point read_pair(const Json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(field + ": expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

ScenarioConfig from_json(const Json& root) {
  ScenarioConfig cfg;
  Reader r(root, "");
  cfg.name = r.get<std::string>("name", cfg.name);
  if (r.has("grid")) {
    Reader g(r.raw("grid"), "grid");
    cfg.grid.width_cells = g.get<int>("width_cells", cfg.grid.width_cells);
    cfg.grid.height_cells = g.get<int>("height_cells", cfg.grid.height_cells);
    cfg.grid.cell_size = g.get<double>("cell_size", cfg.grid.cell_size);
    if (g.has("origin")) cfg.grid.origin = read_pair(g.raw("origin"), "grid.origin");
    g.finish();
  }
  if (r.has("gaussian_components")) {
    const auto& arr = r.raw("gaussian_components");
    if (!arr.is_array()) throw ConfigError("gaussian_components: expected a list");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const auto path = "gaussian_components[" + std::to_string(k) + "]";
      Reader c(arr[k], path);
      GaussianComponent gc;
      if (!c.has("center")) throw ConfigError(path + ".center: missing");
      gc.center = read_pair(c.raw("center"), path + ".center");
      gc.sigma = c.get<double>("sigma", 3.0);
      gc.amplitude = c.get<double>("amplitude", 1.0);
      c.finish();
      cfg.components.push_back(gc);
    }
  }
  if (r.has("targets")) {
    Reader t(r.raw("targets"), "targets");
    const auto mode = t.get<std::string>("mode", "threshold");
    if (mode == "threshold") {
      cfg.targets.mode = TargetMode::Threshold;
    } else if (mode == "bernoulli") {
      cfg.targets.mode = TargetMode::Bernoulli;
    } else {
      throw ConfigError("targets.mode: expected threshold or bernoulli");
    }
    cfg.targets.threshold = t.get<double>("threshold", cfg.targets.threshold);
    t.finish();
  }
  if (r.has("speed_model")) {
    Reader s(r.raw("speed_model"), "speed_model");
    const auto kind = s.get<std::string>("kind", "interpolated");
    if (kind == "three_speed") {
      cfg.speed_model.kind = SpeedKind::ThreeSpeed;
    } else if (kind == "interpolated") {
      cfg.speed_model.kind = SpeedKind::Interpolated;
    } else {
      throw ConfigError("speed_model.kind: expected three_speed or interpolated");
    }
    if (s.has("jitter")) {
      const auto j = read_pair(s.raw("jitter"), "speed_model.jitter");
      cfg.speed_model.jitter_lo = j.x;
      cfg.speed_model.jitter_hi = j.y;
    }
    s.finish();
  }
  if (r.has("robots")) {
    const auto& arr = r.raw("robots");
    if (!arr.is_array()) throw ConfigError("robots: expected a list");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const auto path = "robots[" + std::to_string(k) + "]";
      Reader rb(arr[k], path);
      RobotConfig rc;
      if (!rb.has("id")) throw ConfigError(path + ".id: missing");
      rc.id = rb.get<int>("id", 0);
      if (rb.has("start_cell")) {
        const auto& sc = rb.raw("start_cell");
        if (!sc.is_array() || sc.size() != 2 || !sc[0].is_number_integer() || !sc[1].is_number_integer()) {
          throw ConfigError(path + ".start_cell: expected [col, row] integers");
        }
        rc.start_col = sc[0].get<int>();
        rc.start_row = sc[1].get<int>();
      }
      if (!rb.has("speed")) throw ConfigError(path + ".speed: missing");
      Reader sp(rb.raw("speed"), path + ".speed");
      rc.speed.v_max = sp.get<double>("v_max", 0.0);
      rc.speed.v_det = sp.optional<double>("v_det");
      rc.speed.v_int = sp.optional<double>("v_int");
      rc.speed.v_min = sp.optional<double>("v_min");
      sp.finish();
      rc.alpha = rb.get<double>("alpha", rc.alpha);
      rc.noise_sigma = rb.get<double>("noise_sigma", rc.noise_sigma);
      rb.finish();
      cfg.robots.push_back(rc);
    }
  }
  if (r.has("comm_range")) {
    const auto& cr = r.raw("comm_range");
    if (cr.is_string() && cr.get<std::string>() == "unlimited") {
      cfg.network = NetworkConfig::unlimited();
    } else if (cr.is_number()) {
      cfg.network.comm_range = cr.get<double>();
    } else {
      throw ConfigError("comm_range: expected meters or \"unlimited\"");
    }
  }
  cfg.n0 = r.get<int>("n0", cfg.n0);
  if (r.has("strategy")) {
    try {
      cfg.strategy = parse_strategy(r.get<std::string>("strategy", ""));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("strategy: ") + e.what());
    }
  }
  cfg.seed = r.get<std::uint64_t>("seed", cfg.seed);
  if (r.has("estimator")) {
    Reader e(r.raw("estimator"), "estimator");
    auto& est = cfg.estimator;
    est.theta = e.get<double>("theta", est.theta);
    if (e.has("k_range")) {
      const auto& kr = e.raw("k_range");
      if (!kr.is_array() || kr.size() != 2 || !kr[0].is_number_integer() || !kr[1].is_number_integer()) {
        throw ConfigError("estimator.k_range: expected [min, max] integers");
      }
      est.k_min = kr[0].get<int>();
      est.k_max = kr[1].get<int>();
    }
    est.radius = e.get<double>("d", est.radius);
    if (e.has("sigma_grid")) {
      Reader sg(e.raw("sigma_grid"), "estimator.sigma_grid");
      est.sigma_lo = sg.get<double>("lo", est.sigma_lo);
      est.sigma_hi = sg.get<double>("hi", est.sigma_hi);
      est.sigma_step = sg.get<double>("step", est.sigma_step);
      sg.finish();
    }
    est.swd_projections = e.get<int>("swd_projections", est.swd_projections);
    est.prior_density = e.get<double>("prior_density", est.prior_density);
    e.finish();
  }
  cfg.dt = r.get<double>("dt", cfg.dt);
  cfg.max_sim_time = r.get<double>("max_sim_time", cfg.max_sim_time);
  if (r.has("lloyd")) {
    Reader l(r.raw("lloyd"), "lloyd");
    cfg.lloyd_eps = l.get<double>("eps_s", cfg.lloyd_eps);
    cfg.lloyd_max_iters = l.get<int>("max_iters", cfg.lloyd_max_iters);
    l.finish();
  }
  r.finish();
  return cfg;
}

Json to_json(const ScenarioConfig& cfg) {
  Json j;
  j["name"] = cfg.name;
  j["grid"] = {{"width_cells", cfg.grid.width_cells},
               {"height_cells", cfg.grid.height_cells},
               {"cell_size", cfg.grid.cell_size},
               {"origin", {cfg.grid.origin.x, cfg.grid.origin.y}}};
  j["gaussian_components"] = Json::array();
  for (const auto& c : cfg.components) {
    j["gaussian_components"].push_back(
        {{"center", {c.center.x, c.center.y}}, {"sigma", c.sigma}, {"amplitude", c.amplitude}});
  }
  j["targets"] = {{"mode", cfg.targets.mode == TargetMode::Threshold ? "threshold" : "bernoulli"},
                  {"threshold", cfg.targets.threshold}};
  j["speed_model"] = {{"kind", cfg.speed_model.kind == SpeedKind::ThreeSpeed ? "three_speed" : "interpolated"},
                      {"jitter", {cfg.speed_model.jitter_lo, cfg.speed_model.jitter_hi}}};
  j["robots"] = Json::array();
  for (const auto& r : cfg.robots) {
    Json speed = {{"v_max", r.speed.v_max}};
    if (r.speed.v_det) speed["v_det"] = *r.speed.v_det;
    if (r.speed.v_int) speed["v_int"] = *r.speed.v_int;
    if (r.speed.v_min) speed["v_min"] = *r.speed.v_min;
    j["robots"].push_back({{"id", r.id},
                           {"start_cell", {r.start_col, r.start_row}},
                           {"speed", speed},
                           {"alpha", r.alpha},
                           {"noise_sigma", r.noise_sigma}});
  }
  if (cfg.network.comm_range) {
    j["comm_range"] = *cfg.network.comm_range;
  } else {
    j["comm_range"] = "unlimited";
  }
  j["n0"] = cfg.n0;
  j["strategy"] = to_string(cfg.strategy);
  j["seed"] = cfg.seed;
  const auto& e = cfg.estimator;
  j["estimator"] = {{"theta", e.theta},
                    {"k_range", {e.k_min, e.k_max}},
                    {"d", e.radius},
                    {"sigma_grid", {{"lo", e.sigma_lo}, {"hi", e.sigma_hi}, {"step", e.sigma_step}}},
                    {"swd_projections", e.swd_projections},
                    {"prior_density", e.prior_density}};
  j["dt"] = cfg.dt;
  j["max_sim_time"] = cfg.max_sim_time;
  j["lloyd"] = {{"eps_s", cfg.lloyd_eps}, {"max_iters", cfg.lloyd_max_iters}};
  return j;
}

RobotConfig interpolated_robot(RobotId id, int col, int row, double v_max, double v_min) {
  RobotConfig r;
  r.id = id;
  r.start_col = col;
  r.start_row = row;
  r.speed.v_max = v_max;
  r.speed.v_min = v_min;
  return r;
}

ScenarioConfig gmm_scenario(const std::string& name, const std::vector<std::pair<double, double>>& speeds,
                            const std::vector<Point>& centers) {
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.speed_model.kind = SpeedKind::Interpolated;
  for (const auto& c : centers) cfg.components.push_back({c, 3.0, 1.0});
  const int starts[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  for (int i = 0; i < 4; ++i) {
    cfg.robots.push_back(interpolated_robot(i + 1, starts[i][0], starts[i][1], speeds[static_cast<std::size_t>(i)].first,
                                            speeds[static_cast<std::size_t>(i)].second));
  }
  cfg.seed = 1;
  return cfg;
}

const std::vector<std::pair<double, double>> kLargeDiff{{0.05, 0.008}, {0.15, 0.030}, {0.30, 0.060}, {0.40, 0.080}};
const std::vector<std::pair<double, double>> kSmallDiff{{0.08, 0.015}, {0.10, 0.020}, {0.12, 0.025}, {0.15, 0.030}};

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& source) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  ScenarioConfig cfg;
  try {
    cfg = from_json(root);
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  constexpr std::string_view kPresetPrefix = "preset:";
  if (path.starts_with(kPresetPrefix)) return preset(path.substr(kPresetPrefix.size()));
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

std::string serialize_scenario(const ScenarioConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"table1", "ld_2c", "ld_3c", "sd_2c", "sd_3c"};
  return names;
}

ScenarioConfig preset(const std::string& name) {
  if (name == "ld_2c") return gmm_scenario(name, kLargeDiff, {{5.0, 5.0}, {15.0, 15.0}});
  if (name == "ld_3c") return gmm_scenario(name, kLargeDiff, {{5.0, 5.0}, {15.0, 5.0}, {10.0, 15.0}});
  if (name == "sd_2c") return gmm_scenario(name, kSmallDiff, {{5.0, 5.0}, {15.0, 15.0}});
  if (name == "sd_3c") return gmm_scenario(name, kSmallDiff, {{5.0, 10.0}, {10.0, 5.0}, {15.0, 15.0}});
  if (name == "table1") {
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.speed_model = {SpeedKind::ThreeSpeed, 0.5, 1.5};
    // Targets in the lower-left and upper-right quarters only.
    cfg.components = {{{5.0, 5.0}, 3.0, 1.0}, {{14.0, 15.0}, 3.0, 1.0}};
    cfg.targets = {TargetMode::Threshold, 0.5};
    const double table[4][3] = {{3.0, 1.0, 0.1}, {2.0, 0.8, 0.12}, {5.0, 0.6, 0.08}, {4.0, 0.12, 0.06}};
    const int starts[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    for (int i = 0; i < 4; ++i) {
      RobotConfig r;
      r.id = i + 1;
      r.start_col = starts[i][0];
      r.start_row = starts[i][1];
      r.speed.v_max = table[i][0];
      r.speed.v_det = table[i][1];
      r.speed.v_int = table[i][2];
      cfg.robots.push_back(r);
    }
    cfg.seed = 1;
    return cfg;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace mdcpp
