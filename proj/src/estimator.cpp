#include "mdcpp/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace mdcpp {

void ObservationStore::ingest(const Observation& obs) {
  if (obs.z < 0.0) throw std::invalid_argument("ingest: observed density must be non-negative");
  all_[obs.cell] = obs;
  if (obs.z > threshold_) {
    filtered_[obs.cell] = obs;
  } else {
    filtered_.erase(obs.cell);
  }
}

std::size_t ObservationStore::merge(const ObservationStore& other) {
  std::size_t added = 0;
  for (const auto& [cell, obs] : other.all_) {
    if (all_.contains(cell)) continue;
    ingest(obs);
    ++added;
  }
  return added;
}

std::size_t ObservationStore::merge(std::span<const Observation> readings) {
  std::size_t added = 0;
  for (const auto& obs : readings) {
    if (all_.contains(obs.cell)) continue;
    ingest(obs);
    ++added;
  }
  return added;
}

std::vector<Point> ObservationStore::filtered_points() const {
  std::vector<Point> pts;
  pts.reserve(filtered_.size());
  for (const auto& [cell, obs] : filtered_) pts.push_back(obs.where);
  return pts;
}

namespace {

int nearest_centroid(Point p, std::span<const Point> centroids) {
  int best = 0;
  double best_d = squared_distance(p, centroids[0]);
  for (int k = 1; k < static_cast<int>(centroids.size()); ++k) {
    const double d = squared_distance(p, centroids[static_cast<std::size_t>(k)]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double unit_gaussian(Point p, Point center, double sigma) {
  return std::exp(-squared_distance(p, center) / (2.0 * sigma * sigma));
}

}  // namespace

KMeansResult kmeans(std::span<const Point> points, int k, Rng& rng, int max_iters) {
  const auto n = points.size();
  if (n == 0) throw std::invalid_argument("kmeans: empty point set");
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("kmeans: k must lie in [1, number of points]");
  }

  // Farthest-point seeding.
  std::vector<std::size_t> seeds;
  std::vector<bool> chosen(n, false);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  seeds.push_back(pick(rng));
  chosen[seeds[0]] = true;
  std::vector<double> min_d(n);
  for (std::size_t i = 0; i < n; ++i) min_d[i] = squared_distance(points[i], points[seeds[0]]);
  while (seeds.size() < static_cast<std::size_t>(k)) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      if (best == n || min_d[i] > min_d[best]) best = i;
    }
    seeds.push_back(best);
    chosen[best] = true;
    for (std::size_t i = 0; i < n; ++i) min_d[i] = std::min(min_d[i], squared_distance(points[i], points[best]));
  }

  KMeansResult res;
  res.centroids.reserve(seeds.size());
  for (auto s : seeds) res.centroids.push_back(points[s]);
  res.labels.assign(n, -1);

  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = nearest_centroid(points[i], res.centroids);
      if (c != res.labels[i]) {
        res.labels[i] = c;
        changed = true;
      }
      wcss += squared_distance(points[i], res.centroids[static_cast<std::size_t>(c)]);
    }
    res.wcss_history.push_back(wcss);
    res.iterations = it + 1;

    std::vector<Point> sums(static_cast<std::size_t>(k));
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(res.labels[i]);
      sums[c] = sums[c] + points[i];
      ++counts[c];
    }
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (counts[c] > 0) res.centroids[c] = sums[c] * (1.0 / static_cast<double>(counts[c]));
    }
    if (!changed && it > 0) break;
  }

  res.wcss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    res.wcss += squared_distance(points[i], res.centroids[static_cast<std::size_t>(res.labels[i])]);
  }
  return res;
}

FitScoreBreakdown fit_score(std::span<const Point> centers, const ObservationStore& store, double radius,
                            double sigma) {
  if (centers.empty()) throw std::invalid_argument("fit_score: no candidate centers");
  if (store.empty()) throw std::invalid_argument("fit_score: observation store is empty");

  FitScoreBreakdown out;
  std::vector<double> observed, predicted;
  for (const Point& mu : centers) {
    ComponentScore cs;
    double nearest = std::numeric_limits<double>::infinity();
    observed.clear();
    predicted.clear();
    for (const auto& [cell, obs] : store.all()) {
      const double d2 = squared_distance(obs.where, mu);
      if (d2 < nearest) {
        nearest = d2;
        cs.peak_density = obs.z;
      }
      if (d2 < radius * radius) {
        observed.push_back(obs.z);
        predicted.push_back(unit_gaussian(obs.where, mu, sigma));
      }
    }
    cs.explored_count = static_cast<int>(observed.size());
    cs.pearson = pearson(observed, predicted);
    cs.score = cs.peak_density * cs.explored_count * cs.pearson;
    out.aggregate += cs.score;
    out.per_component.push_back(cs);
  }
  out.aggregate /= static_cast<double>(centers.size());
  return out;
}

double EstimatorParams::sigma_midpoint() const {
  if (sigma_grid.empty()) return 0.0;
  return 0.5 * (sigma_grid.front() + sigma_grid.back());
}

std::vector<double> make_sigma_grid(double lo, double hi, double step) {
  if (!(lo > 0.0) || hi < lo || !(step > 0.0)) {
    throw std::invalid_argument("sigma grid: need 0 < lo <= hi and step > 0");
  }
  const auto n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grid.push_back(lo + step * i);
  return grid;
}

GmmEstimate select_k(const ObservationStore& store, int k_min, int k_max, double radius, double pearson_sigma,
                     Rng& rng) {
  GmmEstimate best;
  const auto points = store.filtered_points();
  if (points.empty()) return best;
  const int k_hi = std::min<int>(k_max, static_cast<int>(points.size()));
  bool have = false;
  for (int k = std::max(1, k_min); k <= k_hi; ++k) {
    const auto km = kmeans(points, k, rng);
    const auto score = fit_score(km.centroids, store, radius, pearson_sigma);
    if (!have || score.aggregate > best.fit_score) {
      have = true;
      best.fit_score = score.aggregate;
      best.components.clear();
      for (const auto& c : km.centroids) best.components.push_back({c, pearson_sigma, false});
    }
  }
  return best;
}

SigmaFit fit_sigma(Point center, const ObservationStore& store, std::span<const double> sigma_grid, double radius) {
  if (sigma_grid.empty()) throw std::invalid_argument("fit_sigma: empty sigma grid");
  std::vector<const Observation*> explored;
  for (const auto& [cell, obs] : store.all()) {
    if (squared_distance(obs.where, center) < radius * radius) explored.push_back(&obs);
  }
  if (explored.empty()) {
    return {0.5 * (sigma_grid.front() + sigma_grid.back()), 0.0, true};
  }
  SigmaFit best{sigma_grid[0], std::numeric_limits<double>::infinity(), false};
  for (double s : sigma_grid) {
    double sse = 0.0;
    for (const auto* obs : explored) {
      const double r = obs->z - unit_gaussian(obs->where, center, s);
      sse += r * r;
    }
    const double mse = sse / static_cast<double>(explored.size());
    if (mse < best.mse) best = {s, mse, false};
  }
  return best;
}

GmmEstimate estimate_mixture(const ObservationStore& store, const EstimatorParams& params,
                             const GmmEstimate& previous, Rng& rng) {
  double pearson_sigma = params.sigma_midpoint();
  if (!previous.components.empty()) {
    pearson_sigma = 0.0;
    for (const auto& c : previous.components) pearson_sigma += c.sigma;
    pearson_sigma /= static_cast<double>(previous.components.size());
  }
  GmmEstimate est = select_k(store, params.k_min, params.k_max, params.radius, pearson_sigma, rng);
  for (auto& c : est.components) {
    const auto fit = fit_sigma(c.center, store, params.sigma_grid, params.radius);
    c.sigma = fit.sigma;
    c.low_confidence = fit.low_confidence;
  }
  return est;
}

double predicted_density(const GmmEstimate& estimate, Point p, double prior) {
  if (estimate.components.empty()) return prior;
  double best = 0.0;
  for (const auto& c : estimate.components) best = std::max(best, unit_gaussian(p, c.center, c.sigma));
  return best;
}

double sliced_wasserstein(std::span<const double> a, std::span<const double> b, std::span<const Point> support,
                          int n_projections, Rng& rng) {
  if (a.size() != b.size() || a.size() != support.size()) {
    throw std::invalid_argument("sliced_wasserstein: fields and support differ in size");
  }
  if (n_projections < 1) throw std::invalid_argument("sliced_wasserstein: need at least one projection");
  const double mass_a = std::accumulate(a.begin(), a.end(), 0.0);
  const double mass_b = std::accumulate(b.begin(), b.end(), 0.0);
  if (!(mass_a > 0.0) || !(mass_b > 0.0)) {
    throw std::domain_error("sliced_wasserstein: distance undefined for a field with zero mass");
  }

  const std::size_t n = support.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] / mass_a - b[i] / mass_b;

  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<double> proj(n);
  std::vector<std::size_t> order(n);
  double total = 0.0;
  for (int p = 0; p < n_projections; ++p) {
    const double phi = angle(rng);
    const Point dir{std::cos(phi), std::sin(phi)};
    for (std::size_t i = 0; i < n; ++i) proj[i] = support[i].x * dir.x + support[i].y * dir.y;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return proj[l] < proj[r]; });
    // W1 in 1D is the integral of |F_a - F_b|.
    double cdf = 0.0, w1 = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      cdf += diff[order[k]];
      w1 += std::abs(cdf) * (proj[order[k + 1]] - proj[order[k]]);
    }
    total += w1;
  }
  return total / n_projections;
}

}  // namespace mdcpp
