#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "mdcpp/assignment.hpp"
#include "mdcpp/netsim.hpp"
#include "mdcpp/world.hpp"

namespace mdcpp::testing {

// Random partitioning instance: grid, robot sites and the cells to split.
struct Instance {
  GridSpec grid;
  std::vector<RobotSite> robots;
  std::vector<CellIndex> cells;
};

inline Instance random_instance(Rng& rng, int max_side = 20, int max_robots = 6, double uncovered_frac_lo = 0.3) {
  std::uniform_int_distribution<int> side(2, max_side);
  std::uniform_int_distribution<int> nr(1, max_robots);
  std::uniform_real_distribution<double> alpha(0.2, 3.0);
  std::uniform_real_distribution<double> frac(uncovered_frac_lo, 1.0);
  Instance inst;
  inst.grid.width_cells = side(rng);
  inst.grid.height_cells = side(rng);
  inst.grid.cell_size = 10.0;
  const double keep = frac(rng);
  std::bernoulli_distribution kept(keep);
  for (CellIndex c = 0; c < inst.grid.cell_count(); ++c) {
    if (kept(rng)) inst.cells.push_back(c);
  }
  if (inst.cells.empty()) inst.cells.push_back(0);
  const int m = std::min<int>(nr(rng), static_cast<int>(inst.cells.size()));
  std::uniform_real_distribution<double> x(0.0, inst.grid.width_cells * inst.grid.cell_size);
  std::uniform_real_distribution<double> y(0.0, inst.grid.height_cells * inst.grid.cell_size);
  for (int i = 0; i < m; ++i) inst.robots.push_back({i + 1, {x(rng), y(rng)}, alpha(rng)});
  return inst;
}

// Capacities recomputed independently: floor of the exact quota, then the
// leftover units to the largest fractional parts (lower index on ties).
inline std::vector<std::size_t> reference_capacities(std::size_t total, const std::vector<double>& w) {
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<std::size_t> out(w.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double q = static_cast<double>(total) * w[i] / sum;
    out[i] = static_cast<std::size_t>(std::floor(q));
    used += out[i];
    rem.push_back({q - std::floor(q), i});
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; k < total - used; ++k) ++out[rem[k].second];
  return out;
}

// Number of cell pairs (g_i in S_i, g_j in S_j) whose exchange would lower
// the summed distance to owners, over the given robot pairs.
inline int improving_swaps(const Partition& part, const std::vector<RobotSite>& robots, const GridSpec& grid,
                           const std::set<std::pair<RobotId, RobotId>>& pairs) {
  std::map<RobotId, Point> pos;
  for (const auto& r : robots) pos[r.id] = r.position;
  const auto sets = part.sets();
  int bad = 0;
  for (const auto& [a, b] : pairs) {
    if (!sets.contains(a) || !sets.contains(b)) continue;
    for (auto gi : sets.at(a)) {
      const double ki = distance(grid.centroid(gi), pos[a]) - distance(grid.centroid(gi), pos[b]);
      for (auto gj : sets.at(b)) {
        const double kj = distance(grid.centroid(gj), pos[b]) - distance(grid.centroid(gj), pos[a]);
        if (ki + kj > 1e-9) ++bad;
      }
    }
  }
  return bad;
}

inline std::set<std::pair<RobotId, RobotId>> all_pairs(const std::vector<RobotSite>& robots) {
  std::set<std::pair<RobotId, RobotId>> out;
  for (std::size_t i = 0; i < robots.size(); ++i) {
    for (std::size_t j = i + 1; j < robots.size(); ++j) out.insert({robots[i].id, robots[j].id});
  }
  return out;
}

// Union-find components over an explicit range graph.
inline std::vector<std::vector<RobotId>> union_find_components(const std::vector<RobotPosition>& pos, double range) {
  std::vector<std::size_t> parent(pos.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < pos.size(); ++i) {
    for (std::size_t j = i + 1; j < pos.size(); ++j) {
      if (std::hypot(pos[i].position.x - pos[j].position.x, pos[i].position.y - pos[j].position.y) <= range) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::map<std::size_t, std::vector<RobotId>> groups;
  for (std::size_t i = 0; i < pos.size(); ++i) groups[find(i)].push_back(pos[i].id);
  std::vector<std::vector<RobotId>> out;
  for (auto& [root, g] : groups) {
    std::sort(g.begin(), g.end());
    out.push_back(g);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mdcpp::testing
