#include "mdcpp/planner.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mdcpp {

double path_length(Point start, std::span<const Waypoint> cells) {
  double len = 0.0;
  Point at = start;
  for (const auto& w : cells) {
    len += distance(at, w.at);
    at = w.at;
  }
  return len;
}

CoveragePath nearest_neighbor_path(Point start, std::span<const Waypoint> cells) {
  CoveragePath path;
  path.start = start;
  std::vector<Waypoint> left(cells.begin(), cells.end());
  path.cells.reserve(left.size());
  Point at = start;
  while (!left.empty()) {
    std::size_t best = 0;
    double best_d = squared_distance(at, left[0].at);
    for (std::size_t i = 1; i < left.size(); ++i) {
      const double d = squared_distance(at, left[i].at);
      if (d < best_d || (d == best_d && left[i].cell < left[best].cell)) {
        best = i;
        best_d = d;
      }
    }
    path.total_length += distance(at, left[best].at);
    at = left[best].at;
    path.cells.push_back(left[best]);
    left[best] = left.back();
    left.pop_back();
  }
  return path;
}

CoveragePath brute_force_path(Point start, std::span<const Waypoint> cells) {
  if (cells.size() > kBruteForceLimit) {
    throw std::length_error("brute_force_path: more than 10 cells is too large to enumerate");
  }
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return cells[a].cell < cells[b].cell; });

  CoveragePath best;
  best.start = start;
  best.total_length = std::numeric_limits<double>::infinity();
  std::vector<Waypoint> candidate(cells.size());
  do {
    for (std::size_t i = 0; i < order.size(); ++i) candidate[i] = cells[order[i]];
    const double len = path_length(start, candidate);
    if (len < best.total_length) {
      best.total_length = len;
      best.cells = candidate;
    }
  } while (std::next_permutation(order.begin(), order.end(),
                                 [&](auto a, auto b) { return cells[a].cell < cells[b].cell; }));
  if (cells.empty()) best.total_length = 0.0;
  return best;
}

double path_travel_time(const CoveragePath& path, double v_max) {
  if (!(v_max > 0.0)) throw std::invalid_argument("path_travel_time: speed must be positive");
  return path.total_length / v_max;
}

}  // namespace mdcpp
