#include "mdcpp/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mdcpp {

void GridSpec::validate() const {
  if (width_cells <= 0 || height_cells <= 0) {
    throw std::invalid_argument("grid: width_cells and height_cells must be positive");
  }
  if (!(cell_size > 0.0)) {
    throw std::invalid_argument("grid: cell_size must be positive");
  }
}

CellIndex GridSpec::index(int c, int r) const {
  if (!contains_cell(c, r)) {
    throw std::out_of_range("cell (" + std::to_string(c) + ", " + std::to_string(r) + ") outside grid");
  }
  return static_cast<CellIndex>(r) * static_cast<CellIndex>(width_cells) + static_cast<CellIndex>(c);
}

Point GridSpec::centroid(CellIndex cell) const {
  if (cell >= cell_count()) throw std::out_of_range("cell index " + std::to_string(cell) + " outside grid");
  return {origin.x + (col(cell) + 0.5) * cell_size, origin.y + (row(cell) + 0.5) * cell_size};
}

CellIndex GridSpec::cell_at(Point p) const {
  const int c = std::clamp(static_cast<int>(std::floor((p.x - origin.x) / cell_size)), 0, width_cells - 1);
  const int r = std::clamp(static_cast<int>(std::floor((p.y - origin.y) / cell_size)), 0, height_cells - 1);
  return index(c, r);
}

std::vector<Point> GridSpec::centroids() const {
  std::vector<Point> out;
  out.reserve(cell_count());
  for (CellIndex c = 0; c < cell_count(); ++c) out.push_back(centroid(c));
  return out;
}

double true_density(std::span<const GaussianComponent> components, Point p) {
  double sum = 0.0;
  for (const auto& g : components) {
    sum += g.amplitude * std::exp(-squared_distance(p, g.center) / (2.0 * g.sigma * g.sigma));
  }
  return sum;
}

GroundTruthField::GroundTruthField(GridSpec grid, std::vector<GaussianComponent> components)
    : grid_(grid), components_(std::move(components)) {
  grid_.validate();
  for (const auto& g : components_) {
    if (!(g.sigma > 0.0) || !(g.amplitude > 0.0)) {
      throw std::invalid_argument("gaussian component: sigma and amplitude must be positive");
    }
  }
  density_cache_.reserve(grid_.cell_count());
  for (CellIndex c = 0; c < grid_.cell_count(); ++c) {
    density_cache_.push_back(true_density(components_, grid_.centroid(c)));
  }
  if (!density_cache_.empty()) {
    max_cell_density_ = *std::max_element(density_cache_.begin(), density_cache_.end());
  }
}

double observe(const GroundTruthField& field, CellIndex cell, double noise_sigma, Rng& rng) {
  if (cell >= field.grid().cell_count()) {
    throw std::out_of_range("observe: cell index " + std::to_string(cell) + " outside grid");
  }
  const double truth = field.cell_density(cell);
  if (noise_sigma <= 0.0) return truth;
  std::normal_distribution<double> noise(0.0, noise_sigma);
  return std::max(0.0, truth + noise(rng));
}

CoverageState::CoverageState(std::size_t cell_count, std::vector<bool> has_targets)
    : covered_(cell_count, false), has_targets_(std::move(has_targets)) {
  if (has_targets_.size() != cell_count) {
    throw std::invalid_argument("coverage state: has_targets size does not match cell count");
  }
}

bool CoverageState::mark_covered(CellIndex cell) {
  if (cell >= covered_.size()) {
    throw std::out_of_range("mark_covered: cell index " + std::to_string(cell) + " outside grid");
  }
  if (covered_[cell]) return false;
  covered_[cell] = true;
  ++covered_count_;
  return true;
}

std::vector<CellIndex> CoverageState::uncovered_cells() const {
  std::vector<CellIndex> out;
  for (CellIndex c = 0; c < covered_.size(); ++c) {
    if (!covered_[c]) out.push_back(c);
  }
  return out;
}

std::vector<bool> seed_targets(const GroundTruthField& field, TargetMode mode, double threshold, Rng& rng) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw std::invalid_argument("seed_targets: threshold must lie in [0, 1]");
  }
  const auto& rho = field.densities();
  std::vector<bool> out(rho.size(), false);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 0; c < rho.size(); ++c) {
    if (mode == TargetMode::Threshold) {
      out[c] = rho[c] > threshold;
    } else {
      // Draw for every cell so the stream position does not depend on density.
      const double u = unit(rng);
      out[c] = u < std::min(1.0, rho[c]);
    }
  }
  return out;
}

}  // namespace mdcpp
