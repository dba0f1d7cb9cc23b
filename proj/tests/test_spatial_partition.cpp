#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "sppm/spatial_partition.hpp"
#include "support.hpp"

using namespace sppm;

namespace {

void check_moments(const LocationSet& loc) {
  const double n = static_cast<double>(loc.size());
  double mx = 0, my = 0;
  for (const Point& p : loc.coords()) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double vx = 0, vy = 0;
  for (const Point& p : loc.coords()) {
    vx += (p.x - mx) * (p.x - mx);
    vy += (p.y - my) * (p.y - my);
  }
  CHECK(std::abs(mx) < 1e-12);
  CHECK(std::abs(my) < 1e-12);
  CHECK(std::abs(std::sqrt(vx / (n - 1)) - 1.0) < 1e-12);
  CHECK(std::abs(std::sqrt(vy / (n - 1)) - 1.0) < 1e-12);
}

// Bell numbers by the triangle recurrence.
long bell(int n) {
  std::vector<long> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<long> next{row.back()};
    for (long v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

}  // namespace

TEST_CASE("standardize gives zero mean and unit sample sd per axis") {
  const std::vector<Point> square{{0, 0}, {2, 0}, {0, 2}, {2, 2}};
  check_moments(LocationSet::standardize(square));

  Rng rng(11);
  const auto cloud = test::random_points(50, rng, -5.0, 7.0);
  const LocationSet loc = LocationSet::standardize(cloud);
  check_moments(loc);

  SUBCASE("idempotent") {
    const LocationSet again = LocationSet::standardize(loc.coords());
    for (std::size_t i = 0; i < loc.size(); ++i) {
      CHECK(std::abs(again[i].x - loc[i].x) < 1e-12);
      CHECK(std::abs(again[i].y - loc[i].y) < 1e-12);
    }
  }
  SUBCASE("to_working maps raw inputs onto stored coordinates") {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point w = loc.to_working(cloud[i]);
      CHECK(std::abs(w.x - loc[i].x) < 1e-12);
      CHECK(std::abs(w.y - loc[i].y) < 1e-12);
    }
  }
}

TEST_CASE("standardize rejects degenerate input") {
  const std::vector<Point> one{{0, 0}};
  CHECK_THROWS_AS(LocationSet::standardize(one), std::invalid_argument);
  const std::vector<Point> dup{{0, 0}, {1, 1}, {0, 0}};
  CHECK_THROWS_AS(LocationSet::standardize(dup), std::invalid_argument);
  const std::vector<Point> flat{{0, 1}, {1, 1}, {2, 1}};
  CHECK_THROWS_AS(LocationSet::standardize(flat), std::invalid_argument);
  CHECK_THROWS_AS(LocationSet::from_coordinates(dup), std::invalid_argument);
}

TEST_CASE("distance matrix is a metric") {
  Rng rng(3);
  const auto pts = test::random_points(25, rng);
  const LocationSet loc = LocationSet::from_coordinates(pts);
  const auto& d = loc.distances();
  for (std::size_t i = 0; i < loc.size(); ++i) {
    CHECK(d(i, i) == 0.0);
    for (std::size_t j = 0; j < loc.size(); ++j) {
      CHECK(d(i, j) == d(j, i));
      CHECK(d(i, j) == doctest::Approx(distance(pts[i], pts[j])).epsilon(1e-14));
      for (std::size_t k = 0; k < loc.size(); ++k) CHECK(d(i, k) <= d(i, j) + d(j, k) + 1e-12);
    }
  }
}

TEST_CASE("median pairwise distance") {
  const std::vector<Point> pts{{0, 0}, {1, 0}, {3, 0}};
  // Distances 1, 2, 3.
  CHECK(LocationSet::from_coordinates(pts).median_pairwise_distance() == doctest::Approx(2.0));
}

TEST_CASE("partition canonical labels") {
  const std::vector<int> raw{7, 7, 3, 9, 3};
  const Partition p(raw);
  CHECK(std::vector<int>(p.labels().begin(), p.labels().end()) == std::vector<int>{0, 0, 1, 2, 1});
  CHECK(p.num_clusters() == 3);
  CHECK(p.num_singletons() == 1);
  CHECK(p.max_cluster_size() == 2);
  CHECK(p.members(1) == std::vector<int>{2, 4});
  CHECK(p == Partition(std::vector<int>{1, 1, 0, 5, 0}));
  CHECK(Partition::single_cluster(4).num_clusters() == 1);
  CHECK(Partition::singletons(4).num_clusters() == 4);
}

TEST_CASE("centroid and spread") {
  const std::vector<Point> pts{{1, 1}, {3, 1}, {10, 10}};
  const LocationSet loc = LocationSet::from_coordinates(pts);
  const std::vector<int> single{2};
  CHECK(cluster_centroid_spread(single, loc).spread == 0.0);
  const std::vector<int> pair{0, 1};
  const auto cs = cluster_centroid_spread(pair, loc);
  CHECK(cs.centroid.x == doctest::Approx(2.0));
  CHECK(cs.centroid.y == doctest::Approx(1.0));
  CHECK(cs.spread == doctest::Approx(2.0));
  CHECK_THROWS_AS(cluster_centroid_spread(std::vector<int>{}, loc), std::invalid_argument);

  Rng rng(5);
  const auto five = test::random_points(5, rng);
  const auto got = cluster_centroid_spread(std::span<const Point>(five));
  Point c{0, 0};
  for (const Point& p : five) {
    c.x += p.x / 5;
    c.y += p.y / 5;
  }
  double spread = 0.0;
  for (const Point& p : five) spread += distance(p, c);
  CHECK(std::abs(got.centroid.x - c.x) < 1e-12);
  CHECK(std::abs(got.centroid.y - c.y) < 1e-12);
  CHECK(std::abs(got.spread - spread) < 1e-12);
}

TEST_CASE("spatial connectivity") {
  const auto grid = test::grid_points(4, 4);
  const LocationSet loc = LocationSet::from_coordinates(grid);
  CHECK(is_spatially_connected(Partition::single_cluster(16), loc).connected);
  CHECK(is_spatially_connected(Partition::singletons(16), loc).connected);

  SUBCASE("a cluster split by an interposed point is disconnected") {
    const std::vector<Point> line{{0, 0}, {1, 0}, {2, 0}};
    const LocationSet l3 = LocationSet::from_coordinates(line);
    const auto rep = is_spatially_connected(Partition(std::vector<int>{0, 1, 0}), l3);
    CHECK_FALSE(rep.connected);
    CHECK_FALSE(rep.cluster_connected[0]);
    CHECK(rep.cluster_connected[1]);
  }
  SUBCASE("left and right halves are connected") {
    std::vector<int> labels(16);
    for (std::size_t i = 0; i < 16; ++i) labels[i] = grid[i].x < 2 ? 0 : 1;
    CHECK(is_spatially_connected(Partition(labels), loc).connected);
  }
  SUBCASE("invariant under relabeling, rotation and translation") {
    Rng rng(8);
    const auto pts = test::random_points(9, rng);
    std::vector<int> labels{0, 1, 0, 2, 1, 0, 2, 2, 1};
    std::vector<int> relabeled(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) relabeled[i] = 2 - labels[i];
    std::vector<Point> moved;
    const double c = std::cos(0.7), s = std::sin(0.7);
    for (const Point& p : pts) moved.push_back({c * p.x - s * p.y + 3.0, s * p.x + c * p.y - 1.0});
    const LocationSet a = LocationSet::from_coordinates(pts);
    const LocationSet b = LocationSet::from_coordinates(moved);
    const auto ra = is_spatially_connected(Partition(labels), a);
    CHECK(ra.connected == is_spatially_connected(Partition(relabeled), a).connected);
    CHECK(ra.connected == is_spatially_connected(Partition(labels), b).connected);
    CHECK(ra.cluster_connected == is_spatially_connected(Partition(labels), b).cluster_connected);
  }
}

TEST_CASE("enumeration yields Bell(n) distinct partitions") {
  CHECK(enumerate_partitions(1).size() == 1);
  CHECK(enumerate_partitions(3).size() == 5);
  for (int n = 1; n <= 8; ++n) {
    const auto parts = enumerate_partitions(n);
    CHECK(static_cast<long>(parts.size()) == bell(n));
    const std::set<Partition> unique(parts.begin(), parts.end());
    CHECK(unique.size() == parts.size());
  }
  long count = 0;
  PartitionEnumerator it(10);
  do ++count;
  while (it.next());
  CHECK(count == 115975);
  CHECK(count == bell(10));
  CHECK_THROWS_AS(PartitionEnumerator(0), std::out_of_range);
  CHECK_THROWS_AS(PartitionEnumerator(13), std::out_of_range);
}
