#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "mdcpp/geometry.hpp"
#include "mdcpp/netsim.hpp"
#include "mdcpp/world.hpp"

namespace mdcpp {

/// A robot as seen by the partitioner. `alpha` is the capacity weight that
/// sets the robot's share of cells.
struct RobotSite {
  RobotId id = 0;
  Point position;
  double alpha = 1.0;
};

/// Ownership of the cells being partitioned, plus the cell count each robot
/// was initialized with.
struct Partition {
  std::map<CellIndex, RobotId> owner;
  std::map<RobotId, std::size_t> capacity;

  std::vector<CellIndex> cells_of(RobotId id) const;
  std::map<RobotId, std::vector<CellIndex>> sets() const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Splits `total` proportionally to non-negative `weights`. Remainder units go
/// to the largest fractional parts; equal remainders go to the lower index.
std::vector<std::size_t> largest_remainder(std::size_t total, std::span<const double> weights);

struct WorkloadModel {
  std::map<RobotId, double> alpha;
  std::map<RobotId, double> phi;
};

/// phi * alpha * sum of distances from q to the robot's cells; 0 when the
/// robot owns nothing.
double workload(RobotId id, const Partition& partition, Point q, const WorkloadModel& model, const GridSpec& grid);

/// Sum of a per-cell density over the robot's cells.
double phi_from_density(RobotId id, const Partition& partition, std::span<const double> cell_density);

struct LloydOptions {
  double eps_s = 1.0;
  int max_iters = 100;
};

struct LloydResult {
  std::vector<Point> goals;
  int iterations = 0;
  bool converged = false;
  /// Power-partition objective after each assignment step.
  std::vector<double> objective_history;
  std::vector<int> labels;
};

/// Power-diagram Lloyd iteration. Each cell goes to the site minimizing
/// |g - q_i|^2 - w_i^2 (ties to the lower index); each site then moves to
/// the density-weighted centroid of its cells. An empty `cell_weight`
/// means uniform weight. Stops when every site moved less than eps_s.
LloydResult lloyd_init(const GridSpec& grid, std::span<const double> cell_weight, std::span<const Point> start,
                       std::span<const double> power_weight, const LloydOptions& options);

/// sum_g rho_g (|g - q_label(g)|^2 - w_label(g)^2).
double power_objective(const GridSpec& grid, std::span<const double> cell_weight, std::span<const Point> sites,
                       std::span<const int> labels, std::span<const double> power_weight);

/// Random split of `cells` with counts from largest_remainder over the
/// robots' alpha. Robots are handled in ascending id order.
Partition initial_capacity_assignment(std::span<const CellIndex> cells, std::span<const RobotSite> robots, Rng& rng);

/// |g - q_i| - |g - q_j|; positive when robot j is closer to g.
inline double swap_key(Point g, Point q_i, Point q_j) { return distance(g, q_i) - distance(g, q_j); }

struct SwapOutcome {
  std::vector<CellIndex> s_i;
  std::vector<CellIndex> s_j;
  int swaps = 0;
};

/// Heap-driven exchange between two robots: pop the largest key from each
/// side and trade the two cells while the key sum is positive.
SwapOutcome pairwise_swap(std::span<const CellIndex> s_i, std::span<const CellIndex> s_j, Point q_i, Point q_j,
                          const GridSpec& grid);

struct AssignmentStats {
  int passes = 0;
  int swaps = 0;
  int initializers = 0;
};

/// Single-process reference: same initialization and swap order as the
/// distributed protocol run over a complete graph.
Partition centralized_assignment(std::span<const RobotSite> robots, std::span<const CellIndex> cells,
                                 const GridSpec& grid, Rng& rng, AssignmentStats* stats = nullptr);

/// Capacity-constrained swap protocol over the network snapshot.
///
/// Every robot whose id is the smallest in its closed neighborhood pools
/// the previously owned cells of the robots that elect it and deals them
/// out at random by capacity. Neighbor pairs then swap (lower id drives)
/// until a full pass makes no swap. Robots electing nobody keep their
/// previous cells. `prior_owner` lists the cells to partition and who held
/// them; every owner must be one of `robots`.
Partition distributed_assignment(std::span<const RobotSite> robots, const std::map<CellIndex, RobotId>& prior_owner,
                                 const GridSpec& grid, Network& net, Rng& rng, AssignmentStats* stats = nullptr);

/// Expected time for robot `robot_index` to cover `cell`, seconds.
using CellCostFn = std::function<double(std::size_t robot_index, CellIndex cell)>;

/// Estimated completion time of one robot for a cell set: coverage time
/// plus nearest-neighbor travel at `travel_speed`, divided by alpha.
double estimated_completion(const RobotSite& robot, std::size_t robot_index, std::span<const CellIndex> cells,
                            const GridSpec& grid, const CellCostFn& cost, double travel_speed);

struct BalanceResult {
  std::vector<std::size_t> counts;
  std::vector<double> estimated_times;
  int evaluations = 0;
};

/// Chooses per-robot cell counts that minimize the largest estimated
/// completion time. Starts from counts proportional to alpha over mean
/// per-cell time and moves cells from the slowest to the quickest robot
/// while the maximum keeps dropping. Each candidate is scored on a
/// centralized_assignment seeded with `seed`.
BalanceResult balance_capacities(std::span<const RobotSite> robots, std::span<const CellIndex> pool,
                                 const GridSpec& grid, const CellCostFn& cost, std::span<const double> travel_speed,
                                 std::uint64_t seed, int max_evaluations = 32);

}  // namespace mdcpp
