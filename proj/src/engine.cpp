#include "mdcpp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mdcpp {

namespace {

constexpr double kTimeEps = 1e-9;

CoverageState make_coverage(const ScenarioConfig& cfg, const GroundTruthField& truth, Rng& rng) {
  auto targets = seed_targets(truth, cfg.targets.mode, cfg.targets.threshold, rng);
  return CoverageState(truth.grid().cell_count(), std::move(targets));
}

const ScenarioConfig& validated(const ScenarioConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

double coverage_speed(const SpeedModel& model, const SpeedProfile& speed, bool has_targets, double rho_norm,
                      double jitter) {
  if (model.kind == SpeedKind::ThreeSpeed) {
    const double base = has_targets ? speed.v_int.value_or(speed.v_max) : speed.v_det.value_or(speed.v_max);
    return base * jitter;
  }
  const double rho = std::clamp(rho_norm, 0.0, 1.0);
  const double v_min = speed.v_min.value_or(speed.v_max);
  return speed.v_max + (v_min - speed.v_max) * rho;
}

double expected_coverage_speed(const SpeedModel& model, const SpeedProfile& speed, double rho) {
  const double r = std::clamp(rho, 0.0, 1.0);
  if (model.kind == SpeedKind::ThreeSpeed) {
    const double v_det = speed.v_det.value_or(speed.v_max);
    const double v_int = speed.v_int.value_or(v_det);
    return v_det + (v_int - v_det) * r;
  }
  const double v_min = speed.v_min.value_or(speed.v_max);
  return speed.v_max + (v_min - speed.v_max) * r;
}

Simulation::Simulation(const ScenarioConfig& cfg, Strategy strategy)
    : cfg_(validated(cfg)),
      strategy_(strategy),
      grid_(cfg.grid),
      truth_(cfg.grid, cfg.components_in_meters()),
      rng_(cfg.seed),
      metrics_rng_(cfg.seed ^ 0x9e3779b97f4a7c15ULL),
      coverage_(make_coverage(cfg, truth_, rng_)),
      est_params_(cfg.estimator_params()),
      centroids_(grid_.centroids()),
      team_store_(cfg.estimator.theta) {
  auto sorted = cfg_.robots;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& rc : sorted) {
    RobotState r;
    r.id = rc.id;
    r.position = grid_.centroid(grid_.index(rc.start_col, rc.start_row));
    r.speed = rc.speed;
    r.alpha = rc.alpha;
    r.noise_sigma = rc.noise_sigma;
    r.store = ObservationStore(cfg_.estimator.theta);
    robots_.push_back(std::move(r));
  }
  log_.truth_density = truth_.densities();
  for (const auto& r : robots_) log_.trajectory.push_back({0.0, r.id, r.position});

  if (strategy_ == Strategy::Sweeping) {
    initialize_sweeping();
  } else {
    initialize_dynamic();
  }
  record_swd(0.0);
}

RobotState& Simulation::robot(RobotId id) {
  for (auto& r : robots_) {
    if (r.id == id) return r;
  }
  throw std::invalid_argument("unknown robot id " + std::to_string(id));
}

double Simulation::draw_jitter() {
  if (cfg_.speed_model.kind != SpeedKind::ThreeSpeed) return 1.0;
  std::uniform_real_distribution<double> u(cfg_.speed_model.jitter_lo, cfg_.speed_model.jitter_hi);
  return u(rng_);
}

double Simulation::travel_speed(const RobotState& r) { return r.speed.v_max * draw_jitter(); }

double Simulation::estimate_density(const RobotState& coordinator, CellIndex cell) const {
  if (strategy_ == Strategy::DynamicNoPrediction) return 1.0;
  return predicted_density(coordinator.estimate, centroids_[cell], est_params_.prior_density);
}

void Simulation::initialize_sweeping() {
  const auto m = robots_.size();
  const auto widths = largest_remainder(static_cast<std::size_t>(grid_.width_cells), std::vector<double>(m, 1.0));
  int x0 = 0;
  for (std::size_t k = 0; k < m; ++k) {
    auto& r = robots_[k];
    const int w = static_cast<int>(widths[k]);
    for (int row = 0; row < grid_.height_cells; ++row) {
      for (int i = 0; i < w; ++i) {
        const int col = (row % 2 == 0) ? x0 + i : x0 + w - 1 - i;
        const auto cell = grid_.index(col, row);
        r.path.push_back({cell, grid_.centroid(cell)});
        r.assigned.insert(cell);
      }
    }
    if (w > 0) {
      r.goal = grid_.centroid(grid_.index(x0, 0));
      r.mode = RobotMode::ToInitialGoal;
      log_.paths.push_back({0.0, r.id, r.path});
    } else {
      r.mode = RobotMode::Idle;
    }
    x0 += w;
  }
  snapshot_partition();
}

void Simulation::initialize_dynamic() {
  std::vector<Point> starts;
  for (const auto& r : robots_) starts.push_back(r.position);
  const auto lloyd = lloyd_init(grid_, {}, starts, {}, {cfg_.lloyd_eps * grid_.cell_size, cfg_.lloyd_max_iters});
  lloyd_goals_ = lloyd.goals;

  std::vector<CellIndex> pool(grid_.cell_count());
  std::iota(pool.begin(), pool.end(), CellIndex{0});
  std::vector<RobotSite> sites;
  std::vector<double> vmax;
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    sites.push_back({robots_[i].id, lloyd.goals[i], robots_[i].alpha});
    vmax.push_back(robots_[i].speed.v_max);
  }
  const auto& coordinator = robots_.front();
  const CellCostFn cost = [&](std::size_t i, CellIndex c) {
    const double v = expected_coverage_speed(cfg_.speed_model, robots_[i].speed, estimate_density(coordinator, c));
    return grid_.cell_size / v;
  };
  const auto balance = balance_capacities(sites, pool, grid_, cost, vmax, rng_());
  for (std::size_t i = 0; i < sites.size(); ++i) sites[i].alpha = static_cast<double>(balance.counts[i]);

  // Offline: the team is together before deployment, so the exchange runs
  // over a complete graph.
  std::map<CellIndex, RobotId> prior;
  for (auto c : pool) prior[c] = coordinator.id;
  std::vector<RobotPosition> snap;
  for (const auto& s : sites) snap.push_back({s.id, s.position});
  Network net(NetworkConfig::unlimited(), snap);
  const auto part = distributed_assignment(sites, prior, grid_, net, rng_);
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    auto& r = robots_[i];
    const auto cells = part.cells_of(r.id);
    r.assigned = {cells.begin(), cells.end()};
    r.goal = lloyd.goals[i];
    r.mode = RobotMode::ToInitialGoal;
  }
  snapshot_partition();
  log_.traffic.push_back({0.0, net.counters().sent, net.counters().dropped});
}

std::map<CellIndex, RobotId> Simulation::ownership() const {
  std::map<CellIndex, RobotId> out;
  for (const auto& r : robots_) {
    for (auto c : r.assigned) {
      if (!coverage_.is_covered(c)) out[c] = r.id;
    }
  }
  return out;
}

void Simulation::snapshot_partition() { log_.partitions.push_back({time_, ownership()}); }

void Simulation::replan(RobotState& r, std::optional<Waypoint> locked) {
  std::vector<Waypoint> wps;
  for (auto c : r.assigned) {
    if (locked && c == locked->cell) continue;
    wps.push_back({c, centroids_[c]});
  }
  const Point from = locked ? locked->at : r.position;
  auto nn = nearest_neighbor_path(from, wps);
  r.path.clear();
  if (locked) r.path.push_back(*locked);
  r.path.insert(r.path.end(), nn.cells.begin(), nn.cells.end());
  if (!locked) {
    r.covering_target = false;
    r.leg_speed = 0.0;
  }
  log_.paths.push_back({time_, r.id, r.path});
}

void Simulation::step() {
  if (finished()) return;
  std::set<RobotId> busy;
  if (strategy_ != Strategy::Sweeping) check_triggers(busy);
  for (auto& r : robots_) {
    if (!busy.contains(r.id)) advance(r, cfg_.dt);
  }
  flush_team_observations();
  time_ += cfg_.dt;
  if (!coverage_.complete() && time_ >= cfg_.max_sim_time) aborted_ = true;
}

void Simulation::check_triggers(std::set<RobotId>& busy) {
  const auto count = coverage_.covered_count();
  std::optional<std::vector<std::vector<RobotId>>> comps;
  for (auto& r : robots_) {
    if (r.mode == RobotMode::ToInitialGoal) continue;
    if (r.assigned.size() >= static_cast<std::size_t>(cfg_.n0)) continue;
    if (r.last_trigger_count == count) continue;
    r.last_trigger_count = count;
    if (busy.contains(r.id)) continue;
    if (!comps) {
      std::vector<RobotPosition> snap;
      for (const auto& o : robots_) snap.push_back({o.id, o.position});
      comps = connected_components(snap, cfg_.network);
    }
    const auto& comp = *std::find_if(comps->begin(), comps->end(), [&](const auto& c) {
      return std::find(c.begin(), c.end(), r.id) != c.end();
    });
    if (comp.size() < 2) continue;
    const bool any_busy = std::any_of(comp.begin(), comp.end(), [&](RobotId id) { return busy.contains(id); });
    if (any_busy) continue;
    repartition(comp, r.id);
    busy.insert(comp.begin(), comp.end());
  }
}

void Simulation::repartition(const std::vector<RobotId>& component, RobotId requester) {
  std::map<RobotId, std::optional<Waypoint>> locked;
  std::map<CellIndex, RobotId> prior;
  for (RobotId id : component) {
    auto& r = robot(id);
    if (r.mode == RobotMode::Covering && !r.path.empty()) locked[id] = r.path.front();
    else locked[id] = std::nullopt;
    for (auto c : r.assigned) {
      if (locked[id] && locked[id]->cell == c) continue;
      prior[c] = id;
    }
  }
  if (prior.empty()) return;

  std::vector<RobotPosition> snap;
  for (RobotId id : component) snap.push_back({id, robot(id).position});
  Network net(cfg_.network, snap);
  net.send({requester, std::nullopt, payload::RepartitionRequest{}});

  if (strategy_ == Strategy::Mdcpp) {
    // Flood observations through the component until every store agrees.
    std::set<RobotId> updated;
    for (std::size_t round = 0; round < component.size(); ++round) {
      for (RobotId id : component) {
        std::vector<Observation> mine;
        for (const auto& [cell, obs] : robot(id).store.all()) mine.push_back(obs);
        net.send({id, std::nullopt, payload::ObservationShare{std::move(mine)}});
      }
      bool any = false;
      for (RobotId id : component) {
        for (const auto& msg : net.drain(id)) {
          if (const auto* share = std::get_if<payload::ObservationShare>(&msg.payload)) {
            if (robot(id).store.merge(share->observations) > 0) {
              any = true;
              updated.insert(id);
            }
          }
        }
      }
      if (!any) break;
    }
    for (RobotId id : updated) {
      auto& r = robot(id);
      r.estimate = estimate_mixture(r.store, est_params_, r.estimate, rng_);
    }
  } else {
    for (RobotId id : component) net.drain(id);
  }

  std::vector<CellIndex> pool;
  for (const auto& [cell, who] : prior) pool.push_back(cell);
  std::vector<RobotSite> sites;
  std::vector<double> vmax;
  std::vector<const RobotState*> members;
  for (RobotId id : component) {
    const auto& r = robot(id);
    sites.push_back({id, r.position, r.alpha});
    vmax.push_back(r.speed.v_max);
    members.push_back(&r);
  }
  const auto& coordinator = robot(component.front());
  const CellCostFn cost = [&](std::size_t i, CellIndex c) {
    const double v = expected_coverage_speed(cfg_.speed_model, members[i]->speed, estimate_density(coordinator, c));
    return grid_.cell_size / v;
  };
  const auto balance = balance_capacities(sites, pool, grid_, cost, vmax, rng_());
  for (std::size_t i = 0; i < sites.size(); ++i) sites[i].alpha = static_cast<double>(balance.counts[i]);
  const auto part = distributed_assignment(sites, prior, grid_, net, rng_);

  for (RobotId id : component) {
    auto& r = robot(id);
    const auto cells = part.cells_of(id);
    r.assigned = {cells.begin(), cells.end()};
    if (locked[id]) r.assigned.insert(locked[id]->cell);
    if (r.mode == RobotMode::ToInitialGoal) {
      r.path.clear();
      continue;  // planned on arrival
    }
    replan(r, locked[id]);
    if (!r.path.empty()) r.mode = RobotMode::Covering;
    r.last_trigger_count = coverage_.covered_count();
  }
  ++partition_events_;
  snapshot_partition();
  log_.traffic.push_back({time_, net.counters().sent, net.counters().dropped});
}

void Simulation::advance(RobotState& r, double budget) {
  double used = 0.0;
  auto move_toward = [&](Point target) {
    const double d = distance(r.position, target);
    const double reach = d / r.leg_speed;
    if (reach <= budget) {
      r.position = target;
      r.path_length += d;
      budget -= reach;
      used += reach;
      r.leg_speed = 0.0;
      log_.trajectory.push_back({time_ + used, r.id, r.position});
      return true;
    }
    const double step_len = r.leg_speed * budget;
    r.position = r.position + (target - r.position) * (step_len / d);
    r.path_length += step_len;
    used += budget;
    budget = 0.0;
    return false;
  };

  while (budget > kTimeEps) {
    if (r.mode == RobotMode::ToInitialGoal) {
      if (r.leg_speed == 0.0) r.leg_speed = travel_speed(r);
      if (!move_toward(r.goal)) break;
      r.mode = RobotMode::Covering;
      if (r.path.empty()) replan(r, std::nullopt);
      continue;
    }
    if (r.path.empty()) {
      r.mode = RobotMode::Idle;
      break;
    }
    r.mode = RobotMode::Covering;
    const Waypoint target = r.path.front();
    if (!r.covering_target) {
      if (r.leg_speed == 0.0) r.leg_speed = travel_speed(r);
      if (!move_toward(target.at)) break;
      r.covering_target = true;
      const double rho_norm =
          truth_.max_cell_density() > 0.0 ? truth_.cell_density(target.cell) / truth_.max_cell_density() : 0.0;
      const double v =
          coverage_speed(cfg_.speed_model, r.speed, coverage_.has_targets(target.cell), rho_norm, draw_jitter());
      r.cover_remaining = grid_.cell_size / v;
      continue;
    }
    if (r.cover_remaining <= budget) {
      budget -= r.cover_remaining;
      used += r.cover_remaining;
      r.cover_remaining = 0.0;
      complete_cell(r, time_ + used);
    } else {
      r.cover_remaining -= budget;
      used += budget;
      budget = 0.0;
    }
  }
}

void Simulation::complete_cell(RobotState& r, double at_time) {
  const CellIndex cell = r.path.front().cell;
  coverage_.mark_covered(cell);
  const Observation obs{cell, centroids_[cell], observe(truth_, cell, r.noise_sigma, rng_)};
  r.store.ingest(obs);
  pending_team_obs_.push_back({at_time, obs});
  if (strategy_ == Strategy::Mdcpp) r.estimate = estimate_mixture(r.store, est_params_, r.estimate, rng_);
  r.assigned.erase(cell);
  r.path.erase(r.path.begin());
  r.covering_target = false;
  r.finish_time = at_time;
}

void Simulation::flush_team_observations() {
  std::stable_sort(pending_team_obs_.begin(), pending_team_obs_.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [at_time, obs] : pending_team_obs_) {
    team_store_.ingest(obs);
    team_estimate_ = estimate_mixture(team_store_, est_params_, team_estimate_, metrics_rng_);
    record_swd(at_time);
  }
  pending_team_obs_.clear();
}

void Simulation::record_swd(double at_time) {
  const auto& truth = truth_.densities();
  if (!(std::accumulate(truth.begin(), truth.end(), 0.0) > 0.0)) return;
  std::vector<double> pred(centroids_.size());
  double mass = 0.0;
  for (std::size_t c = 0; c < centroids_.size(); ++c) {
    pred[c] = predicted_density(team_estimate_, centroids_[c], est_params_.prior_density);
    mass += pred[c];
  }
  // An estimate with no mass carries no information: compare a flat field.
  if (!(mass > 0.0)) std::fill(pred.begin(), pred.end(), 1.0);
  swd_series_.push_back(
      {at_time, sliced_wasserstein(pred, truth, centroids_, est_params_.swd_projections, metrics_rng_)});
}

ScenarioResult Simulation::result() const {
  ScenarioResult res;
  for (const auto& r : robots_) {
    res.per_robot_path_length[r.id] = r.path_length;
    res.per_robot_finish_time[r.id] = r.finish_time;
    res.total_path_length += r.path_length;
    res.completion_time = std::max(res.completion_time, r.finish_time);
  }
  res.aborted = aborted_;
  if (aborted_) res.completion_time = time_;
  res.swd_series = swd_series_;
  res.partition_events = partition_events_;
  res.end_time = time_;
  return res;
}

ScenarioResult run(const ScenarioConfig& cfg, Strategy strategy, RunLog* log) {
  Simulation sim(cfg, strategy);
  while (!sim.finished()) sim.step();
  if (log) {
    *log = sim.log();
    log->predicted_density.clear();
    for (const auto& p : sim.config().grid.centroids()) {
      log->predicted_density.push_back(
          predicted_density(sim.team_estimate(), p, sim.config().estimator.prior_density));
    }
  }
  return sim.result();
}

}  // namespace mdcpp
