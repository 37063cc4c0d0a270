#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "mdcpp/geometry.hpp"

namespace mdcpp {

struct Observation {
  CellIndex cell = 0;
  Point where;
  double z = 0.0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Per-robot record of cell readings. The filtered view holds only readings
/// strictly above the threshold and is kept in step with the latest value
/// recorded for each cell.
class ObservationStore {
 public:
  explicit ObservationStore(double threshold = 0.6) : threshold_(threshold) {}

  /// Latest reading for a cell replaces any older one. Throws
  /// std::invalid_argument on a negative reading.
  void ingest(const Observation& obs);
  /// Takes every reading of `other` for cells this store has not seen.
  /// Returns the number of new cells.
  std::size_t merge(const ObservationStore& other);
  std::size_t merge(std::span<const Observation> readings);

  double threshold() const { return threshold_; }
  const std::map<CellIndex, Observation>& all() const { return all_; }
  const std::map<CellIndex, Observation>& filtered() const { return filtered_; }
  std::vector<Point> filtered_points() const;
  std::size_t size() const { return all_.size(); }
  bool empty() const { return all_.empty(); }

 private:
  double threshold_;
  std::map<CellIndex, Observation> all_;
  std::map<CellIndex, Observation> filtered_;
};

struct KMeansResult {
  std::vector<int> labels;
  std::vector<Point> centroids;
  double wcss = 0.0;
  int iterations = 0;
  /// Within-cluster sum of squares after every assignment step.
  std::vector<double> wcss_history;
};

/// Lloyd-iteration k-means with farthest-point seeding. The first seed is
/// drawn from rng; everything after is deterministic. Throws
/// std::invalid_argument when k is not in [1, points.size()].
KMeansResult kmeans(std::span<const Point> points, int k, Rng& rng, int max_iters = 300);

struct ComponentScore {
  double peak_density = 0.0;
  int explored_count = 0;
  double pearson = 0.0;
  double score = 0.0;
};

struct FitScoreBreakdown {
  std::vector<ComponentScore> per_component;
  double aggregate = 0.0;
};

/// Composite fit score of candidate centers against the stored readings.
///
/// For each center: the reading at the nearest observed cell, the number of
/// observed cells strictly within `radius`, and the Pearson correlation
/// between those readings and a unit Gaussian of width `sigma` at the
/// center (0 with fewer than two cells or zero variance). The aggregate is
/// the mean of the per-center products.
FitScoreBreakdown fit_score(std::span<const Point> centers, const ObservationStore& store, double radius,
                            double sigma);

struct EstimatedComponent {
  Point center;
  double sigma = 0.0;
  /// Set when no observed cell lay near the center and sigma fell back to
  /// the middle of the search range.
  bool low_confidence = false;

  friend bool operator==(const EstimatedComponent&, const EstimatedComponent&) = default;
};

struct GmmEstimate {
  std::vector<EstimatedComponent> components;
  double fit_score = 0.0;

  int k_hat() const { return static_cast<int>(components.size()); }
  friend bool operator==(const GmmEstimate&, const GmmEstimate&) = default;
};

struct EstimatorParams {
  double threshold = 0.6;
  int k_min = 1;
  int k_max = 5;
  /// Exploration radius, meters.
  double radius = 50.0;
  /// Candidate deviations, meters, ascending.
  std::vector<double> sigma_grid;
  int swd_projections = 50;
  double prior_density = 0.0;

  double sigma_midpoint() const;
};

/// Inclusive arithmetic grid lo, lo+step, ..., hi.
std::vector<double> make_sigma_grid(double lo, double hi, double step);

/// Picks the candidate cluster count with the best fit score. Centers only;
/// sigma of each component is left at `pearson_sigma`. An empty filtered
/// set yields an empty estimate.
GmmEstimate select_k(const ObservationStore& store, int k_min, int k_max, double radius, double pearson_sigma,
                     Rng& rng);

struct SigmaFit {
  double sigma = 0.0;
  double mse = 0.0;
  bool low_confidence = false;
};

/// Exhaustive MSE search over the sigma grid using observed cells within
/// `radius` of the center. Ties go to the smaller sigma.
SigmaFit fit_sigma(Point center, const ObservationStore& store, std::span<const double> sigma_grid, double radius);

/// select_k followed by fit_sigma for every selected center. `previous`
/// supplies the width used for the correlation term.
GmmEstimate estimate_mixture(const ObservationStore& store, const EstimatorParams& params,
                             const GmmEstimate& previous, Rng& rng);

/// Max-composition of unit Gaussians; `prior` when the estimate is empty.
double predicted_density(const GmmEstimate& estimate, Point p, double prior = 0.0);

/// Mean 1D Wasserstein-1 distance over random projection directions between
/// two non-negative fields on the same support. Throws std::domain_error if
/// either field has zero mass.
double sliced_wasserstein(std::span<const double> a, std::span<const double> b, std::span<const Point> support,
                          int n_projections, Rng& rng);

}  // namespace mdcpp
