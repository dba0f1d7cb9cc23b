#pragma once

#include <compare>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sppm/point.hpp"

namespace sppm {

/// n distinct planar locations with a cached Euclidean distance matrix.
///
/// Coordinates are stored on the working (usually standardized) scale. The
/// affine map from raw input coordinates is kept so new sites can be placed
/// on the same scale as the training locations.
class LocationSet {
 public:
  /// Centers each axis to mean 0 and scales it to sample sd 1 (divisor n-1).
  /// Throws std::invalid_argument for fewer than two points, a constant axis
  /// or coincident points.
  static LocationSet standardize(std::span<const Point> raw);

  /// Uses the coordinates as given (identity transform). Throws on
  /// coincident points or an empty input.
  static LocationSet from_coordinates(std::span<const Point> coords);

  std::size_t size() const { return coords_.size(); }
  const Point& operator[](std::size_t i) const { return coords_[i]; }
  std::span<const Point> coords() const { return coords_; }
  double distance(std::size_t i, std::size_t j) const { return dist_(i, j); }
  const Eigen::MatrixXd& distances() const { return dist_; }

  /// Maps a raw coordinate onto this set's working scale.
  Point to_working(Point raw) const;
  Point center() const { return center_; }
  Point scale() const { return scale_; }

  /// Median of the n(n-1)/2 pairwise distances.
  double median_pairwise_distance() const;

 private:
  LocationSet(std::vector<Point> coords, Point center, Point scale);

  std::vector<Point> coords_;
  Eigen::MatrixXd dist_;
  Point center_{0.0, 0.0};
  Point scale_{1.0, 1.0};
};

/// A set partition of {0..n-1} stored as canonical labels: cluster ids are
/// 0-based and numbered in order of first appearance. Files use 1-based
/// labels; see io.hpp.
class Partition {
 public:
  Partition() = default;
  /// Accepts arbitrary integer labels and canonicalizes them.
  explicit Partition(std::span<const int> labels);
  explicit Partition(const std::vector<int>& labels)
      : Partition(std::span<const int>(labels)) {}

  static Partition single_cluster(std::size_t n);
  static Partition singletons(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  int num_clusters() const { return static_cast<int>(clusters_.size()); }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const { return labels_; }
  const std::vector<int>& members(int cluster) const { return clusters_[cluster]; }
  const std::vector<std::vector<int>>& clusters() const { return clusters_; }

  bool same_cluster(std::size_t i, std::size_t j) const { return labels_[i] == labels_[j]; }
  int num_singletons() const;
  int max_cluster_size() const;

  friend bool operator==(const Partition& a, const Partition& b) { return a.labels_ == b.labels_; }
  friend auto operator<=>(const Partition& a, const Partition& b) { return a.labels_ <=> b.labels_; }

 private:
  std::vector<int> labels_;
  std::vector<std::vector<int>> clusters_;
};

/// Centroid of a cluster and the summed member distance to it.
struct CentroidSpread {
  Point centroid;
  double spread = 0.0;
};

/// Throws std::invalid_argument for an empty cluster.
CentroidSpread cluster_centroid_spread(std::span<const int> members, const LocationSet& loc);
CentroidSpread cluster_centroid_spread(std::span<const Point> members);

struct ConnectivityReport {
  std::vector<bool> cluster_connected;
  bool connected = true;
};

/// A cluster with two or more members is disconnected when some outside
/// location is closer to every member than that member's nearest fellow
/// member, i.e. d(s_out, s_i) < d(s_j, s_i) for all ordered member pairs
/// i != j. Singletons are always connected.
ConnectivityReport is_spatially_connected(const Partition& partition, const LocationSet& loc);

/// Streams every set partition of {0..n-1} as canonical labels
/// (restricted growth strings) in lexicographic order.
class PartitionEnumerator {
 public:
  static constexpr int kMaxN = 12;

  /// Throws std::out_of_range unless 1 <= n <= kMaxN.
  explicit PartitionEnumerator(int n);

  /// Labels of the current partition.
  std::span<const int> labels() const { return labels_; }
  Partition current() const { return Partition(labels_); }
  /// Advances; returns false after the last partition.
  bool next();

 private:
  std::vector<int> labels_;
  std::vector<int> prefix_max_;
};

/// Materializes the enumeration. Bell(n) entries.
std::vector<Partition> enumerate_partitions(int n);

}  // namespace sppm
