#pragma once

#include <span>
#include <vector>

#include "mdcpp/geometry.hpp"

namespace mdcpp {

/// Uniform square-cell discretization of the task space.
///
/// Cells are indexed row-major from the lower-left corner; the centroid of
/// cell (col, row) sits at origin + ((col + 0.5), (row + 0.5)) * cell_size.
struct GridSpec {
  int width_cells = 20;
  int height_cells = 20;
  double cell_size = 10.0;
  Point origin{};

  /// Throws std::invalid_argument on non-positive dimensions.
  void validate() const;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(width_cells) * static_cast<std::size_t>(height_cells);
  }
  bool contains_cell(int col, int row) const {
    return col >= 0 && row >= 0 && col < width_cells && row < height_cells;
  }
  CellIndex index(int col, int row) const;
  int col(CellIndex cell) const { return static_cast<int>(cell % static_cast<std::size_t>(width_cells)); }
  int row(CellIndex cell) const { return static_cast<int>(cell / static_cast<std::size_t>(width_cells)); }
  Point centroid(CellIndex cell) const;
  /// Cell containing p, clamped to the grid.
  CellIndex cell_at(Point p) const;
  std::vector<Point> centroids() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct GaussianComponent {
  Point center;
  double sigma = 1.0;
  double amplitude = 1.0;

  friend bool operator==(const GaussianComponent&, const GaussianComponent&) = default;
};

/// Sum-of-Gaussians target density. Zero components yields 0 everywhere.
double true_density(std::span<const GaussianComponent> components, Point p);

/// Ground-truth density with a per-cell cache evaluated at the centroids.
class GroundTruthField {
 public:
  GroundTruthField(GridSpec grid, std::vector<GaussianComponent> components);

  double density(Point p) const { return true_density(components_, p); }
  double cell_density(CellIndex cell) const { return density_cache_.at(cell); }
  const std::vector<double>& densities() const { return density_cache_; }
  /// Largest cached cell value; 0 for an empty mixture.
  double max_cell_density() const { return max_cell_density_; }
  const GridSpec& grid() const { return grid_; }
  const std::vector<GaussianComponent>& components() const { return components_; }

 private:
  GridSpec grid_;
  std::vector<GaussianComponent> components_;
  std::vector<double> density_cache_;
  double max_cell_density_ = 0.0;
};

/// Noisy density reading at a cell: truth plus zero-mean Gaussian noise,
/// clamped at zero. Throws std::out_of_range on an invalid cell.
double observe(const GroundTruthField& field, CellIndex cell, double noise_sigma, Rng& rng);

class CoverageState {
 public:
  CoverageState(std::size_t cell_count, std::vector<bool> has_targets);
  explicit CoverageState(std::size_t cell_count)
      : CoverageState(cell_count, std::vector<bool>(cell_count, false)) {}

  /// Returns true if the cell was newly covered. Throws std::out_of_range.
  bool mark_covered(CellIndex cell);
  bool is_covered(CellIndex cell) const { return covered_.at(cell); }
  bool has_targets(CellIndex cell) const { return has_targets_.at(cell); }
  std::size_t covered_count() const { return covered_count_; }
  std::size_t cell_count() const { return covered_.size(); }
  bool complete() const { return covered_count_ == covered_.size(); }
  std::vector<CellIndex> uncovered_cells() const;

 private:
  std::vector<bool> covered_;
  std::vector<bool> has_targets_;
  std::size_t covered_count_ = 0;
};

enum class TargetMode { Threshold, Bernoulli };

/// Threshold mode marks cells with density above the threshold; Bernoulli
/// mode samples each cell with probability min(1, density).
std::vector<bool> seed_targets(const GroundTruthField& field, TargetMode mode, double threshold, Rng& rng);

}  // namespace mdcpp
