#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdcpp/estimator.hpp"
#include "mdcpp/netsim.hpp"
#include "mdcpp/world.hpp"

namespace mdcpp {

enum class Strategy { Mdcpp, DynamicNoPrediction, Sweeping };
enum class SpeedKind { ThreeSpeed, Interpolated };

std::string to_string(Strategy s);
/// Accepts "mdcpp", "dynamic", "sweeping". Throws std::invalid_argument.
Strategy parse_strategy(const std::string& name);
const std::vector<Strategy>& all_strategies();

struct SpeedModel {
  SpeedKind kind = SpeedKind::Interpolated;
  double jitter_lo = 0.5;
  double jitter_hi = 1.5;

  friend bool operator==(const SpeedModel&, const SpeedModel&) = default;
};

/// Average speeds, m/s. ThreeSpeed uses v_max/v_det/v_int, Interpolated
/// uses v_max/v_min.
struct SpeedProfile {
  double v_max = 1.0;
  std::optional<double> v_det;
  std::optional<double> v_int;
  std::optional<double> v_min;

  friend bool operator==(const SpeedProfile&, const SpeedProfile&) = default;
};

struct RobotConfig {
  RobotId id = 1;
  int start_col = 0;
  int start_row = 0;
  SpeedProfile speed;
  double alpha = 1.0;
  double noise_sigma = 0.05;

  friend bool operator==(const RobotConfig&, const RobotConfig&) = default;
};

struct TargetConfig {
  TargetMode mode = TargetMode::Threshold;
  double threshold = 0.5;

  friend bool operator==(const TargetConfig&, const TargetConfig&) = default;
};

/// Estimator settings; lengths in cell widths.
struct EstimatorConfig {
  double theta = 0.6;
  int k_min = 1;
  int k_max = 5;
  double radius = 5.0;
  double sigma_lo = 2.5;
  double sigma_hi = 5.0;
  double sigma_step = 0.1;
  int swd_projections = 50;
  double prior_density = 0.0;

  friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

/// Everything one simulation run needs. Mixture centers, sigmas, the
/// estimator lengths and lloyd_eps are in cell widths; comm_range is in
/// meters.
struct ScenarioConfig {
  std::string name = "scenario";
  GridSpec grid;
  std::vector<GaussianComponent> components;
  TargetConfig targets;
  SpeedModel speed_model;
  std::vector<RobotConfig> robots;
  NetworkConfig network;
  int n0 = 2;
  Strategy strategy = Strategy::Mdcpp;
  std::uint64_t seed = 0;
  EstimatorConfig estimator;
  double dt = 1.0;
  double max_sim_time = 1.0e6;
  double lloyd_eps = 0.1;
  int lloyd_max_iters = 100;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Ground-truth mixture converted to meters.
  std::vector<GaussianComponent> components_in_meters() const;
  EstimatorParams estimator_params() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScenarioConfig parse_scenario(const std::string& text, const std::string& source = "<string>");
/// Reads a scenario file, or a built-in preset given as "preset:<name>".
ScenarioConfig load_scenario(const std::string& path);
std::string serialize_scenario(const ScenarioConfig& cfg);

/// Built-in scenarios: table1, ld_2c, ld_3c, sd_2c, sd_3c.
ScenarioConfig preset(const std::string& name);
const std::vector<std::string>& preset_names();

}  // namespace mdcpp
