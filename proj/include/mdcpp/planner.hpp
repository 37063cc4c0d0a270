#pragma once

#include <span>
#include <vector>

#include "mdcpp/geometry.hpp"

namespace mdcpp {

struct Waypoint {
  CellIndex cell = 0;
  Point at;

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

/// Open coverage path starting at `start` and visiting every cell once.
struct CoveragePath {
  std::vector<Waypoint> cells;
  Point start;
  double total_length = 0.0;
};

/// Greedy nearest-unvisited construction; distance ties go to the lower
/// cell index.
CoveragePath nearest_neighbor_path(Point start, std::span<const Waypoint> cells);

inline constexpr std::size_t kBruteForceLimit = 10;

/// Exact minimum-length open path by permutation enumeration. Throws
/// std::length_error for more than kBruteForceLimit cells.
CoveragePath brute_force_path(Point start, std::span<const Waypoint> cells);

/// Length of start -> cells[0] -> ... -> cells.back().
double path_length(Point start, std::span<const Waypoint> cells);

/// Travel time at v_max. Throws std::invalid_argument on v_max <= 0.
double path_travel_time(const CoveragePath& path, double v_max);

}  // namespace mdcpp
