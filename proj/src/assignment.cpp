#include "mdcpp/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

#include "mdcpp/planner.hpp"

namespace mdcpp {

std::vector<CellIndex> Partition::cells_of(RobotId id) const {
  std::vector<CellIndex> out;
  for (const auto& [cell, who] : owner) {
    if (who == id) out.push_back(cell);
  }
  return out;
}

std::map<RobotId, std::vector<CellIndex>> Partition::sets() const {
  std::map<RobotId, std::vector<CellIndex>> out;
  for (const auto& [id, cap] : capacity) out[id];
  for (const auto& [cell, who] : owner) out[who].push_back(cell);
  return out;
}

std::vector<std::size_t> largest_remainder(std::size_t total, std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("largest_remainder: no weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("largest_remainder: weights must be non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("largest_remainder: weights sum to zero");
  std::vector<std::size_t> counts(weights.size());
  std::vector<double> rem(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = static_cast<double>(total) * weights[i] / sum;
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    rem[i] = quota - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[order[k % order.size()]];
  return counts;
}

double workload(RobotId id, const Partition& partition, Point q, const WorkloadModel& model, const GridSpec& grid) {
  double dist_sum = 0.0;
  bool any = false;
  for (const auto& [cell, who] : partition.owner) {
    if (who != id) continue;
    any = true;
    dist_sum += distance(q, grid.centroid(cell));
  }
  if (!any) return 0.0;
  return model.phi.at(id) * model.alpha.at(id) * dist_sum;
}

double phi_from_density(RobotId id, const Partition& partition, std::span<const double> cell_density) {
  double phi = 0.0;
  for (const auto& [cell, who] : partition.owner) {
    if (who == id) phi += cell_density[cell];
  }
  return phi;
}

namespace {

std::vector<int> power_labels(const std::vector<Point>& centroids, std::span<const Point> sites,
                              std::span<const double> power_weight) {
  std::vector<int> labels(centroids.size(), 0);
  for (std::size_t g = 0; g < centroids.size(); ++g) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const double w = power_weight.empty() ? 0.0 : power_weight[i];
      const double p = squared_distance(centroids[g], sites[i]) - w * w;
      if (p < best) {
        best = p;
        labels[g] = static_cast<int>(i);
      }
    }
  }
  return labels;
}

void shuffle_cells(std::vector<CellIndex>& cells, Rng& rng) {
  for (std::size_t i = cells.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(cells[i - 1], cells[pick(rng)]);
  }
}

struct HeapEntry {
  double key;
  CellIndex cell;
};

struct HeapOrder {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.key != b.key) return a.key < b.key;
    return a.cell > b.cell;
  }
};

using SwapHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder>;

std::vector<RobotSite> sorted_sites(std::span<const RobotSite> robots) {
  std::vector<RobotSite> out(robots.begin(), robots.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].id == out[i - 1].id) throw std::invalid_argument("assignment: duplicate robot id");
  }
  return out;
}

// Deals the shuffled pool to robots in order, counts from alpha.
std::vector<std::vector<CellIndex>> deal(std::vector<CellIndex> pool, const std::vector<const RobotSite*>& robots,
                                         Rng& rng) {
  std::sort(pool.begin(), pool.end());
  std::vector<double> w;
  for (const auto* r : robots) w.push_back(r->alpha);
  if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) w.assign(w.size(), 1.0);
  const auto counts = largest_remainder(pool.size(), w);
  shuffle_cells(pool, rng);
  std::vector<std::vector<CellIndex>> out(robots.size());
  std::size_t at = 0;
  for (std::size_t i = 0; i < robots.size(); ++i) {
    out[i].assign(pool.begin() + static_cast<std::ptrdiff_t>(at),
                  pool.begin() + static_cast<std::ptrdiff_t>(at + counts[i]));
    std::sort(out[i].begin(), out[i].end());
    at += counts[i];
  }
  return out;
}

constexpr int kMaxSwapPasses = 100000;

}  // namespace

double power_objective(const GridSpec& grid, std::span<const double> cell_weight, std::span<const Point> sites,
                       std::span<const int> labels, std::span<const double> power_weight) {
  double h = 0.0;
  for (CellIndex g = 0; g < grid.cell_count(); ++g) {
    const auto i = static_cast<std::size_t>(labels[g]);
    const double rho = cell_weight.empty() ? 1.0 : cell_weight[g];
    const double w = power_weight.empty() ? 0.0 : power_weight[i];
    h += rho * (squared_distance(grid.centroid(g), sites[i]) - w * w);
  }
  return h;
}

LloydResult lloyd_init(const GridSpec& grid, std::span<const double> cell_weight, std::span<const Point> start,
                       std::span<const double> power_weight, const LloydOptions& options) {
  if (!(options.eps_s > 0.0)) throw std::invalid_argument("lloyd_init: eps_s must be positive");
  if (start.empty()) throw std::invalid_argument("lloyd_init: need at least one robot");
  if (!cell_weight.empty() && cell_weight.size() != grid.cell_count()) {
    throw std::invalid_argument("lloyd_init: cell weight size does not match grid");
  }
  if (!power_weight.empty() && power_weight.size() != start.size()) {
    throw std::invalid_argument("lloyd_init: power weight size does not match robot count");
  }
  const auto centroids = grid.centroids();
  LloydResult res;
  res.goals.assign(start.begin(), start.end());
  for (int it = 0; it < options.max_iters; ++it) {
    res.labels = power_labels(centroids, res.goals, power_weight);
    res.objective_history.push_back(power_objective(grid, cell_weight, res.goals, res.labels, power_weight));
    std::vector<Point> sum(res.goals.size());
    std::vector<double> mass(res.goals.size(), 0.0);
    for (CellIndex g = 0; g < centroids.size(); ++g) {
      const auto i = static_cast<std::size_t>(res.labels[g]);
      const double rho = cell_weight.empty() ? 1.0 : cell_weight[g];
      sum[i] = sum[i] + centroids[g] * rho;
      mass[i] += rho;
    }
    double max_move = 0.0;
    for (std::size_t i = 0; i < res.goals.size(); ++i) {
      if (mass[i] <= 0.0) continue;  // empty power cell: stay put
      const Point next = sum[i] * (1.0 / mass[i]);
      max_move = std::max(max_move, distance(next, res.goals[i]));
      res.goals[i] = next;
    }
    res.iterations = it + 1;
    if (max_move < options.eps_s) {
      res.converged = true;
      break;
    }
  }
  return res;
}

Partition initial_capacity_assignment(std::span<const CellIndex> cells, std::span<const RobotSite> robots, Rng& rng) {
  const auto sites = sorted_sites(robots);
  std::vector<const RobotSite*> ptrs;
  for (const auto& s : sites) ptrs.push_back(&s);
  const auto sets = deal(std::vector<CellIndex>(cells.begin(), cells.end()), ptrs, rng);
  Partition p;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    p.capacity[sites[i].id] = sets[i].size();
    for (auto c : sets[i]) p.owner[c] = sites[i].id;
  }
  return p;
}

SwapOutcome pairwise_swap(std::span<const CellIndex> s_i, std::span<const CellIndex> s_j, Point q_i, Point q_j,
                          const GridSpec& grid) {
  SwapHeap h_i, h_j;
  for (auto g : s_i) h_i.push({swap_key(grid.centroid(g), q_i, q_j), g});
  for (auto g : s_j) h_j.push({swap_key(grid.centroid(g), q_j, q_i), g});

  std::vector<CellIndex> to_j, to_i;
  while (!h_i.empty() && !h_j.empty() && h_i.top().key + h_j.top().key > 0.0) {
    to_j.push_back(h_i.top().cell);
    to_i.push_back(h_j.top().cell);
    h_i.pop();
    h_j.pop();
  }

  SwapOutcome out;
  out.swaps = static_cast<int>(to_j.size());
  std::sort(to_j.begin(), to_j.end());
  std::sort(to_i.begin(), to_i.end());
  for (auto g : s_i) {
    if (!std::binary_search(to_j.begin(), to_j.end(), g)) out.s_i.push_back(g);
  }
  for (auto g : s_j) {
    if (!std::binary_search(to_i.begin(), to_i.end(), g)) out.s_j.push_back(g);
  }
  out.s_i.insert(out.s_i.end(), to_i.begin(), to_i.end());
  out.s_j.insert(out.s_j.end(), to_j.begin(), to_j.end());
  std::sort(out.s_i.begin(), out.s_i.end());
  std::sort(out.s_j.begin(), out.s_j.end());
  return out;
}

Partition centralized_assignment(std::span<const RobotSite> robots, std::span<const CellIndex> cells,
                                 const GridSpec& grid, Rng& rng, AssignmentStats* stats) {
  const auto sites = sorted_sites(robots);
  std::vector<const RobotSite*> ptrs;
  for (const auto& s : sites) ptrs.push_back(&s);
  auto sets = deal(std::vector<CellIndex>(cells.begin(), cells.end()), ptrs, rng);

  AssignmentStats local;
  local.initializers = sites.empty() ? 0 : 1;
  bool changed = true;
  while (changed && local.passes < kMaxSwapPasses) {
    changed = false;
    ++local.passes;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      for (std::size_t j = i + 1; j < sites.size(); ++j) {
        auto out = pairwise_swap(sets[i], sets[j], sites[i].position, sites[j].position, grid);
        if (out.swaps > 0) {
          changed = true;
          local.swaps += out.swaps;
          sets[i] = std::move(out.s_i);
          sets[j] = std::move(out.s_j);
        }
      }
    }
  }
  if (stats) *stats = local;

  Partition p;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    p.capacity[sites[i].id] = sets[i].size();
    for (auto c : sets[i]) p.owner[c] = sites[i].id;
  }
  return p;
}

namespace {

// What one robot knows during a protocol run. Nothing here is read by
// another robot except through network messages.
struct LocalState {
  RobotSite self;
  std::vector<RobotId> nbrs;
  std::vector<CellIndex> cells;
  std::map<RobotId, payload::SendStateAndCells> heard;
};

}  // namespace

Partition distributed_assignment(std::span<const RobotSite> robots, const std::map<CellIndex, RobotId>& prior_owner,
                                 const GridSpec& grid, Network& net, Rng& rng, AssignmentStats* stats) {
  const auto sites = sorted_sites(robots);
  std::map<RobotId, LocalState> local;
  for (const auto& s : sites) {
    auto& ls = local[s.id];
    ls.self = s;
    for (RobotId j : net.neighbors_of(s.id)) {
      if (std::any_of(sites.begin(), sites.end(), [j](const auto& r) { return r.id == j; })) ls.nbrs.push_back(j);
    }
  }
  for (const auto& [cell, who] : prior_owner) {
    const auto it = local.find(who);
    if (it == local.end()) {
      throw std::invalid_argument("distributed_assignment: cell owner " + std::to_string(who) + " not in team");
    }
    it->second.cells.push_back(cell);
  }

  auto elected = [&](RobotId id) {
    const auto& ls = local.at(id);
    return ls.nbrs.empty() ? id : std::min(id, ls.nbrs.front());
  };

  AssignmentStats st;

  // Initializers request neighbor sets; everyone else broadcasts theirs.
  for (auto& [id, ls] : local) {
    if (elected(id) == id && !ls.nbrs.empty()) {
      net.send({id, std::nullopt, payload::RequestAssignment{}});
    }
  }
  for (auto& [id, ls] : local) {
    if (!ls.nbrs.empty()) net.send({id, std::nullopt, payload::SendStateAndCells{ls.self.position, ls.cells}});
  }
  for (auto& [id, ls] : local) {
    for (auto& msg : net.drain(id)) {
      if (auto* sc = std::get_if<payload::SendStateAndCells>(&msg.payload)) ls.heard[msg.from] = *sc;
    }
  }

  for (auto& [id, ls] : local) {
    if (elected(id) != id) continue;
    ++st.initializers;
    std::vector<const RobotSite*> handled{&ls.self};
    std::vector<CellIndex> pool = ls.cells;
    for (RobotId j : ls.nbrs) {
      if (elected(j) != id) continue;
      handled.push_back(&local.at(j).self);
      const auto& heard = ls.heard.at(j).cells;
      pool.insert(pool.end(), heard.begin(), heard.end());
    }
    auto sets = deal(std::move(pool), handled, rng);
    ls.cells = sets[0];
    for (std::size_t k = 1; k < handled.size(); ++k) {
      net.send({id, handled[k]->id, payload::SendAssignment{sets[k]}});
    }
  }
  for (auto& [id, ls] : local) {
    for (auto& msg : net.drain(id)) {
      if (auto* sa = std::get_if<payload::SendAssignment>(&msg.payload)) ls.cells = sa->cells;
    }
  }

  Partition p;
  for (const auto& [id, ls] : local) p.capacity[id] = ls.cells.size();

  bool changed = true;
  while (changed && st.passes < kMaxSwapPasses) {
    changed = false;
    ++st.passes;
    for (auto& [i, li] : local) {
      for (RobotId j : li.nbrs) {
        if (j <= i) continue;
        auto& lj = local.at(j);
        net.send({i, j, payload::RequestAssignment{}});
        net.drain(j);
        net.send({j, i, payload::SendStateAndCells{lj.self.position, lj.cells}});
        payload::SendStateAndCells reply;
        for (auto& msg : net.drain(i)) {
          if (auto* sc = std::get_if<payload::SendStateAndCells>(&msg.payload)) reply = std::move(*sc);
        }
        auto out = pairwise_swap(li.cells, reply.cells, li.self.position, reply.position, grid);
        if (out.swaps > 0) {
          changed = true;
          st.swaps += out.swaps;
        }
        li.cells = std::move(out.s_i);
        net.send({i, j, payload::SwappedAssignment{std::move(out.s_j)}});
        for (auto& msg : net.drain(j)) {
          if (auto* sw = std::get_if<payload::SwappedAssignment>(&msg.payload)) lj.cells = std::move(sw->cells);
        }
      }
    }
  }
  if (stats) *stats = st;

  for (const auto& [id, ls] : local) {
    for (auto c : ls.cells) p.owner[c] = id;
  }
  return p;
}

double estimated_completion(const RobotSite& robot, std::size_t robot_index, std::span<const CellIndex> cells,
                            const GridSpec& grid, const CellCostFn& cost, double travel_speed) {
  std::vector<Waypoint> wps;
  wps.reserve(cells.size());
  double cover = 0.0;
  for (auto c : cells) {
    wps.push_back({c, grid.centroid(c)});
    cover += cost(robot_index, c);
  }
  const double travel = nearest_neighbor_path(robot.position, wps).total_length / travel_speed;
  return (cover + travel) / robot.alpha;
}

BalanceResult balance_capacities(std::span<const RobotSite> robots, std::span<const CellIndex> pool,
                                 const GridSpec& grid, const CellCostFn& cost, std::span<const double> travel_speed,
                                 std::uint64_t seed, int max_evaluations) {
  const std::size_t m = robots.size();
  if (m == 0) throw std::invalid_argument("balance_capacities: no robots");
  if (travel_speed.size() != m) throw std::invalid_argument("balance_capacities: one travel speed per robot");
  for (std::size_t i = 1; i < m; ++i) {
    if (robots[i].id <= robots[i - 1].id) throw std::invalid_argument("balance_capacities: robots must be sorted by id");
  }
  BalanceResult res;
  if (m == 1 || pool.empty()) {
    res.counts.assign(m, 0);
    res.counts[0] = pool.size();
    res.estimated_times.assign(m, 0.0);
    res.estimated_times[0] = estimated_completion(robots[0], 0, pool, grid, cost, travel_speed[0]);
    return res;
  }

  // Mean time per cell: coverage plus one cell hop of travel.
  std::vector<double> per_cell(m, 0.0);
  std::vector<double> share(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto c : pool) per_cell[i] += cost(i, c);
    per_cell[i] = per_cell[i] / static_cast<double>(pool.size()) + grid.cell_size / travel_speed[i];
    share[i] = robots[i].alpha / per_cell[i];
  }

  auto evaluate = [&](const std::vector<std::size_t>& counts, std::vector<double>& times) {
    std::vector<RobotSite> sites;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m; ++i) {
      if (counts[i] == 0) continue;
      sites.push_back({robots[i].id, robots[i].position, static_cast<double>(counts[i])});
      idx.push_back(i);
    }
    Rng rng(seed);
    const auto part = centralized_assignment(sites, pool, grid, rng);
    times.assign(m, 0.0);
    for (std::size_t k = 0; k < sites.size(); ++k) {
      const auto cells = part.cells_of(sites[k].id);
      times[idx[k]] = estimated_completion(robots[idx[k]], idx[k], cells, grid, cost, travel_speed[idx[k]]);
    }
    ++res.evaluations;
    return *std::max_element(times.begin(), times.end());
  };

  res.counts = largest_remainder(pool.size(), share);
  double best = evaluate(res.counts, res.estimated_times);
  while (res.evaluations < max_evaluations) {
    const auto& t = res.estimated_times;
    const auto a = static_cast<std::size_t>(std::max_element(t.begin(), t.end()) - t.begin());
    const auto b = static_cast<std::size_t>(std::min_element(t.begin(), t.end()) - t.begin());
    if (a == b || res.counts[a] == 0) break;
    const double gap = (t[a] - t[b]) / (per_cell[a] / robots[a].alpha + per_cell[b] / robots[b].alpha);
    auto delta = std::min<std::size_t>(res.counts[a], std::max<std::size_t>(1, static_cast<std::size_t>(gap)));
    bool improved = false;
    while (res.evaluations < max_evaluations) {
      auto trial = res.counts;
      trial[a] -= delta;
      trial[b] += delta;
      std::vector<double> times;
      const double worst = evaluate(trial, times);
      if (worst < best) {
        best = worst;
        res.counts = std::move(trial);
        res.estimated_times = std::move(times);
        improved = true;
        break;
      }
      if (delta == 1) break;
      delta = std::max<std::size_t>(1, delta / 2);
    }
    if (!improved) break;
  }
  return res;
}

}  // namespace mdcpp
