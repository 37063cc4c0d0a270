#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mdcpp/assignment.hpp"
#include "mdcpp/estimator.hpp"
#include "mdcpp/netsim.hpp"
#include "mdcpp/planner.hpp"
#include "mdcpp/scenario.hpp"
#include "mdcpp/world.hpp"

namespace mdcpp {

/// Speed while covering a cell.
///
/// ThreeSpeed: v_int on a target cell, v_det otherwise, times `jitter`.
/// Interpolated: v_max + (v_min - v_max) * rho_norm with rho_norm clamped
/// to [0, 1]; jitter is not applied.
double coverage_speed(const SpeedModel& model, const SpeedProfile& speed, bool has_targets, double rho_norm,
                      double jitter = 1.0);

/// Coverage speed a robot expects in a cell of (normalized) predicted
/// density. Used for workload estimates, never for motion.
double expected_coverage_speed(const SpeedModel& model, const SpeedProfile& speed, double rho);

enum class RobotMode { ToInitialGoal, Covering, Idle };

struct RobotState {
  RobotId id = 0;
  Point position;
  SpeedProfile speed;
  double alpha = 1.0;
  double noise_sigma = 0.0;
  RobotMode mode = RobotMode::ToInitialGoal;
  Point goal;
  /// Remaining cells in visiting order; front is the current target.
  std::vector<Waypoint> path;
  std::set<CellIndex> assigned;
  bool covering_target = false;
  double leg_speed = 0.0;
  double cover_remaining = 0.0;
  ObservationStore store;
  GmmEstimate estimate;
  double path_length = 0.0;
  double finish_time = 0.0;
  std::optional<std::size_t> last_trigger_count;
};

struct TimedValue {
  double time = 0.0;
  double value = 0.0;
};

struct ScenarioResult {
  double completion_time = 0.0;
  std::map<RobotId, double> per_robot_path_length;
  std::map<RobotId, double> per_robot_finish_time;
  double total_path_length = 0.0;
  std::vector<TimedValue> swd_series;
  int partition_events = 0;
  bool aborted = false;
  double end_time = 0.0;
};

struct TrajectoryPoint {
  double time = 0.0;
  RobotId robot = 0;
  Point at;
};

struct PartitionSnapshot {
  double time = 0.0;
  /// Every uncovered cell and its owner at the moment of the snapshot.
  std::map<CellIndex, RobotId> owner;
};

struct PathRecord {
  double time = 0.0;
  RobotId robot = 0;
  std::vector<Waypoint> waypoints;
};

struct TrafficRecord {
  double time = 0.0;
  std::uint64_t sent = 0;
  std::uint64_t dropped = 0;
};

struct RunLog {
  std::vector<TrajectoryPoint> trajectory;
  std::vector<PartitionSnapshot> partitions;
  std::vector<PathRecord> paths;
  std::vector<TrafficRecord> traffic;
  std::vector<double> truth_density;
  std::vector<double> predicted_density;
};

/// Discrete-time coverage simulation for one scenario and strategy.
class Simulation {
 public:
  Simulation(const ScenarioConfig& cfg, Strategy strategy);

  /// Advances the clock by dt. No-op once finished.
  void step();
  bool finished() const { return coverage_.complete() || aborted_; }
  bool aborted() const { return aborted_; }
  double time() const { return time_; }

  const ScenarioConfig& config() const { return cfg_; }
  const GroundTruthField& truth() const { return truth_; }
  const CoverageState& coverage() const { return coverage_; }
  const std::vector<RobotState>& robots() const { return robots_; }
  const RunLog& log() const { return log_; }
  /// Current owner of every uncovered cell.
  std::map<CellIndex, RobotId> ownership() const;
  /// Estimate fitted to every observation made so far by any robot.
  const GmmEstimate& team_estimate() const { return team_estimate_; }
  const std::vector<Point>& lloyd_goals() const { return lloyd_goals_; }

  ScenarioResult result() const;

 private:
  void initialize_sweeping();
  void initialize_dynamic();
  void check_triggers(std::set<RobotId>& busy);
  void repartition(const std::vector<RobotId>& component, RobotId requester);
  void advance(RobotState& robot, double budget);
  void complete_cell(RobotState& robot, double at_time);
  void replan(RobotState& robot, std::optional<Waypoint> locked);
  double travel_speed(const RobotState& robot);
  double draw_jitter();
  double estimate_density(const RobotState& coordinator, CellIndex cell) const;
  void flush_team_observations();
  void record_swd(double at_time);
  void snapshot_partition();
  RobotState& robot(RobotId id);

  ScenarioConfig cfg_;
  Strategy strategy_;
  GridSpec grid_;
  GroundTruthField truth_;
  Rng rng_;
  Rng metrics_rng_;
  CoverageState coverage_;
  EstimatorParams est_params_;
  std::vector<Point> centroids_;
  std::vector<RobotState> robots_;
  std::vector<Point> lloyd_goals_;
  ObservationStore team_store_;
  /// Readings made during the current step, folded into the team
  /// estimate in time order once every robot has moved.
  std::vector<std::pair<double, Observation>> pending_team_obs_;
  GmmEstimate team_estimate_;
  std::vector<TimedValue> swd_series_;
  int partition_events_ = 0;
  double time_ = 0.0;
  bool aborted_ = false;
  RunLog log_;
};

/// Runs to complete coverage or the max_sim_time watchdog.
ScenarioResult run(const ScenarioConfig& cfg, Strategy strategy, RunLog* log = nullptr);

}  // namespace mdcpp
