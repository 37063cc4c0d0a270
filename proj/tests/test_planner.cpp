#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mdcpp/planner.hpp"

using namespace mdcpp;

namespace {

std::vector<Waypoint> wps(const std::vector<Point>& pts) {
  std::vector<Waypoint> out;
  for (std::size_t i = 0; i < pts.size(); ++i) out.push_back({i, pts[i]});
  return out;
}

std::vector<CellIndex> cells_of(const CoveragePath& p) {
  std::vector<CellIndex> out;
  for (const auto& w : p.cells) out.push_back(w.cell);
  return out;
}

}  // namespace

TEST_CASE("nearest neighbor examples") {
  const auto single = wps({{3, 4}});
  CHECK(nearest_neighbor_path({0, 0}, single).total_length == 5.0);

  const auto three = wps({{1, 0}, {2, 0}, {0, 5}});
  const auto p = nearest_neighbor_path({0, 0}, three);
  CHECK(cells_of(p) == std::vector<CellIndex>{0, 1, 2});
  CHECK(p.total_length == doctest::Approx(2.0 + std::sqrt(29.0)));
  CHECK(path_length({0, 0}, p.cells) == doctest::Approx(p.total_length));

  const auto line = wps({{7, 0}, {3, 0}, {1, 0}, {12, 0}});
  CHECK(cells_of(nearest_neighbor_path({0, 0}, line)) == std::vector<CellIndex>{2, 1, 0, 3});

  const auto none = nearest_neighbor_path({0, 0}, {});
  CHECK(none.cells.empty());
  CHECK(none.total_length == 0.0);
}

TEST_CASE("distance ties go to the lower cell index") {
  std::vector<Waypoint> w{{9, {1, 0}}, {4, {-1, 0}}};
  CHECK(nearest_neighbor_path({0, 0}, w).cells.front().cell == 4);
}

TEST_CASE("brute force examples") {
  const auto tri = wps({{1, 0}, {0.5, std::sqrt(3.0) / 2}});
  CHECK(brute_force_path({0, 0}, tri).total_length == doctest::Approx(2.0));
  const auto one = wps({{2, 2}});
  CHECK(brute_force_path({0, 0}, one).cells == nearest_neighbor_path({0, 0}, one).cells);
  std::vector<Waypoint> big;
  for (int i = 0; i < 11; ++i) big.push_back({static_cast<CellIndex>(i), {double(i), 0}});
  CHECK_THROWS_AS(brute_force_path({0, 0}, big), std::length_error);
}

TEST_CASE("path travel time") {
  CoveragePath p;
  p.total_length = 100.0;
  CHECK(path_travel_time(p, 5.0) == 20.0);
  CHECK(path_travel_time(CoveragePath{}, 1.0) == 0.0);
  CHECK_THROWS(path_travel_time(p, 0.0));
  CHECK_THROWS(path_travel_time(p, -1.0));
  const auto ex = nearest_neighbor_path({0, 0}, wps({{1, 0}, {2, 0}, {0, 5}}));
  CHECK(path_travel_time(ex, 1.0) == doctest::Approx(2.0 + std::sqrt(29.0)));
}

TEST_CASE("greedy output is a deterministic permutation") {
  Rng rng(12);
  std::uniform_real_distribution<double> u(0, 50);
  for (int t = 0; t < 200; ++t) {
    std::vector<Point> pts;
    for (int i = 0; i < 1 + t % 30; ++i) pts.push_back({std::round(u(rng)), std::round(u(rng))});
    const Point start{u(rng), u(rng)};
    const auto a = nearest_neighbor_path(start, wps(pts));
    const auto b = nearest_neighbor_path(start, wps(pts));
    CHECK(a.cells == b.cells);
    auto got = cells_of(a);
    std::sort(got.begin(), got.end());
    std::vector<CellIndex> want(pts.size());
    std::iota(want.begin(), want.end(), CellIndex{0});
    CHECK(got == want);
  }
}
