#include "sppm/spatial_partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sppm/kernels.hpp"

namespace sppm {

LocationSet::LocationSet(std::vector<Point> coords, Point center, Point scale)
    : coords_(std::move(coords)), center_(center), scale_(scale) {
  const std::size_t n = coords_.size();
  dist_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    kernels::distance_row(coords_, coords_[i], row);
    for (std::size_t j = 0; j < n; ++j) dist_(i, j) = row[j];
    dist_(i, i) = 0.0;
  }
  // Symmetrize exactly; the kernel evaluates each direction independently.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dist_(j, i) = dist_(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!(dist_(i, j) > 0.0))
        throw std::invalid_argument("locations " + std::to_string(i) + " and " + std::to_string(j) +
                                    " coincide");
}

LocationSet LocationSet::standardize(std::span<const Point> raw) {
  const std::size_t n = raw.size();
  if (n < 2) throw std::invalid_argument("standardize: need at least two locations");
  Point mean;
  for (const Point& p : raw) {
    mean.x += p.x;
    mean.y += p.y;
  }
  mean.x /= static_cast<double>(n);
  mean.y /= static_cast<double>(n);
  Point ss;
  for (const Point& p : raw) {
    ss.x += (p.x - mean.x) * (p.x - mean.x);
    ss.y += (p.y - mean.y) * (p.y - mean.y);
  }
  const Point sd{std::sqrt(ss.x / static_cast<double>(n - 1)), std::sqrt(ss.y / static_cast<double>(n - 1))};
  if (!(sd.x > 0.0) || !(sd.y > 0.0))
    throw std::invalid_argument("standardize: a coordinate axis has zero variance");
  std::vector<Point> coords;
  coords.reserve(n);
  for (const Point& p : raw) coords.push_back({(p.x - mean.x) / sd.x, (p.y - mean.y) / sd.y});
  return LocationSet(std::move(coords), mean, sd);
}

LocationSet LocationSet::from_coordinates(std::span<const Point> coords) {
  if (coords.empty()) throw std::invalid_argument("from_coordinates: no locations");
  return LocationSet(std::vector<Point>(coords.begin(), coords.end()), {0.0, 0.0}, {1.0, 1.0});
}

Point LocationSet::to_working(Point raw) const {
  return {(raw.x - center_.x) / scale_.x, (raw.y - center_.y) / scale_.y};
}

double LocationSet::median_pairwise_distance() const {
  const std::size_t n = size();
  if (n < 2) throw std::logic_error("median_pairwise_distance: fewer than two locations");
  std::vector<double> d;
  d.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d.push_back(dist_(i, j));
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  if (d.size() % 2 == 1) return d[mid];
  const double upper = d[mid];
  const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

Partition::Partition(std::span<const int> labels) {
  labels_.resize(labels.size());
  std::vector<std::pair<int, int>> seen;  // raw label -> canonical
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& e) { return e.first == labels[i]; });
    int canon;
    if (it == seen.end()) {
      canon = static_cast<int>(seen.size());
      seen.emplace_back(labels[i], canon);
      clusters_.emplace_back();
    } else {
      canon = it->second;
    }
    labels_[i] = canon;
    clusters_[canon].push_back(static_cast<int>(i));
  }
}

Partition Partition::single_cluster(std::size_t n) { return Partition(std::vector<int>(n, 0)); }

Partition Partition::singletons(std::size_t n) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i);
  return Partition(labels);
}

int Partition::num_singletons() const {
  return static_cast<int>(std::count_if(clusters_.begin(), clusters_.end(),
                                        [](const auto& c) { return c.size() == 1; }));
}

int Partition::max_cluster_size() const {
  std::size_t best = 0;
  for (const auto& c : clusters_) best = std::max(best, c.size());
  return static_cast<int>(best);
}

CentroidSpread cluster_centroid_spread(std::span<const Point> members) {
  if (members.empty()) throw std::invalid_argument("cluster_centroid_spread: empty cluster");
  Point c;
  for (const Point& p : members) {
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= static_cast<double>(members.size());
  c.y /= static_cast<double>(members.size());
  return {c, kernels::sum_distances(members, c)};
}

CentroidSpread cluster_centroid_spread(std::span<const int> members, const LocationSet& loc) {
  std::vector<Point> pts;
  pts.reserve(members.size());
  for (int i : members) pts.push_back(loc[static_cast<std::size_t>(i)]);
  return cluster_centroid_spread(pts);
}

ConnectivityReport is_spatially_connected(const Partition& partition, const LocationSet& loc) {
  if (partition.size() != loc.size())
    throw std::invalid_argument("is_spatially_connected: partition and locations differ in size");
  ConnectivityReport report;
  report.cluster_connected.assign(static_cast<std::size_t>(partition.num_clusters()), true);
  const std::size_t n = loc.size();
  for (int h = 0; h < partition.num_clusters(); ++h) {
    const auto& members = partition.members(h);
    if (members.size() < 2) continue;
    // Nearest fellow-member distance for each member.
    std::vector<double> nearest(members.size(), std::numeric_limits<double>::infinity());
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = 0; b < members.size(); ++b)
        if (a != b) nearest[a] = std::min(nearest[a], loc.distance(members[a], members[b]));
    for (std::size_t out = 0; out < n; ++out) {
      if (partition.label(out) == h) continue;
      bool closer_to_all = true;
      for (std::size_t a = 0; a < members.size() && closer_to_all; ++a)
        closer_to_all = loc.distance(out, members[a]) < nearest[a];
      if (closer_to_all) {
        report.cluster_connected[h] = false;
        report.connected = false;
        break;
      }
    }
  }
  return report;
}

PartitionEnumerator::PartitionEnumerator(int n) {
  if (n < 1 || n > kMaxN)
    throw std::out_of_range("enumerate_partitions: n must be in [1, " + std::to_string(kMaxN) + "]");
  labels_.assign(static_cast<std::size_t>(n), 0);
  prefix_max_.assign(static_cast<std::size_t>(n), 0);
}

bool PartitionEnumerator::next() {
  const int n = static_cast<int>(labels_.size());
  for (int i = n - 1; i >= 1; --i) {
    if (labels_[i] <= prefix_max_[i - 1]) {
      ++labels_[i];
      prefix_max_[i] = std::max(prefix_max_[i - 1], labels_[i]);
      for (int j = i + 1; j < n; ++j) {
        labels_[j] = 0;
        prefix_max_[j] = prefix_max_[i];
      }
      return true;
    }
  }
  return false;
}

std::vector<Partition> enumerate_partitions(int n) {
  PartitionEnumerator it(n);
  std::vector<Partition> out;
  do {
    out.push_back(it.current());
  } while (it.next());
  return out;
}

}  // namespace sppm
