#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sppm/point.hpp"
#include "sppm/spatial_partition.hpp"

namespace sppm {

enum class CohesionKind {
  DistancePenalty,   // C1: M Gamma(|S|) / {Gamma(alpha D) or D}
  HardBoundary,      // C2: M Gamma(|S|) 1[all pairwise distances <= a]
  PriorPredictive,   // C3: M Gamma(|S|) x NIW marginal likelihood
  DoubleDip,         // C4: M Gamma(|S|) x NIW marginal under the cluster's own posterior
};

/// Parses "C1".."C4" (case-insensitive); throws std::invalid_argument.
CohesionKind parse_cohesion_kind(std::string_view name);
std::string_view cohesion_name(CohesionKind kind);

enum class Mu0Policy { ClusterCentroid, Fixed };

/// Normal-inverse-Wishart hyperparameters for the bivariate conjugate model
/// m | V ~ N(mu0, V / kappa0), V ~ IW(nu0, Lambda0).
struct NiwHyper {
  double kappa0 = 1.0;
  double nu0 = 2.0;
  Eigen::Matrix2d lambda0 = Eigen::Matrix2d::Identity();
  Mu0Policy mu0_policy = Mu0Policy::ClusterCentroid;
  Point mu0_fixed{0.0, 0.0};

  /// Throws std::invalid_argument unless kappa0 > 0, nu0 > 1 and Lambda0 is
  /// symmetric positive definite.
  void validate() const;
};

struct CohesionConfig {
  CohesionKind kind = CohesionKind::DistancePenalty;
  double M = 1.0;
  double alpha = 1.0;
  double a = 1.0;
  NiwHyper niw;

  void validate() const;
};

/// Sample size, mean and centered scatter matrix of a set of points.
struct NiwStats {
  int n = 0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();

  static NiwStats of(std::span<const Point> pts);
  /// Statistics of the set with one more point (Welford update).
  NiwStats with(Point p) const;
};

/// log of the NIW prior predictive density of the points,
///   log int prod_i N2(s_i | m, V) NIW(m, V) d(m, V).
/// With Mu0Policy::ClusterCentroid, mu0 is the mean of `pts`.
double niw_log_marginal(std::span<const Point> pts, const NiwHyper& niw);

/// As niw_log_marginal, but the integrating measure is the NIW posterior
/// given the same points.
double niw_log_double_dip(std::span<const Point> pts, const NiwHyper& niw);

double niw_log_marginal(const NiwStats& stats, const NiwHyper& niw);
double niw_log_double_dip(const NiwStats& stats, const NiwHyper& niw);

/// log C(S, s*_S) for the configured cohesion. -infinity is returned for an
/// infeasible C2 cluster. Throws std::invalid_argument on an empty cluster.
double log_cohesion(std::span<const Point> members, const CohesionConfig& cfg);
double log_cohesion(std::span<const int> members, const LocationSet& loc, const CohesionConfig& cfg);

/// log C(S u {added}) - log C(S). Requires log C(S) finite, i.e. a feasible
/// cluster under C2; S may be empty, in which case this is log C({added}).
double log_cohesion_ratio(std::span<const Point> members, Point added, const CohesionConfig& cfg);
double log_cohesion_ratio(std::span<const int> members, int added, const LocationSet& loc,
                          const CohesionConfig& cfg);

/// Per-cluster cache for the samplers' hot path: member coordinates, NIW
/// statistics and the current log cohesion. Rebuilt whenever membership
/// changes; ratios for a candidate point are then O(1) for C3/C4 and a single
/// vectorized pass over the members for C1/C2.
struct ClusterGeometry {
  std::vector<Point> pts;
  NiwStats stats;
  double log_cohesion = 0.0;

  static ClusterGeometry build(std::span<const Point> pts, const CohesionConfig& cfg);
  /// Appends a point whose ratio log C(S u {p}) - log C(S) is already known.
  void add(Point p, double log_ratio) {
    stats = pts.empty() ? NiwStats::of(std::span<const Point>(&p, 1)) : stats.with(p);
    pts.push_back(p);
    log_cohesion = pts.size() == 1 ? log_ratio : log_cohesion + log_ratio;
  }
  /// Drops pts[pos] (swap with the last point) and refreshes the cache. A
  /// feasible C2 cluster stays feasible, so its pairwise check is skipped.
  void remove_at(std::size_t pos, const CohesionConfig& cfg);
};

/// log C(S u {added}) - log C(S) using the cached quantities.
double log_cohesion_ratio(const ClusterGeometry& cluster, Point added, const CohesionConfig& cfg);

/// log of the C1 denominator: log Gamma(alpha D) when D >= 1, log D otherwise.
double c1_log_denominator(double spread, double alpha);

}  // namespace sppm
