#include "sppm/cohesion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sppm/kernels.hpp"

namespace sppm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log of the bivariate gamma function Gamma_2(a).
double lmvgamma2(double a) {
  return 0.5 * std::log(std::numbers::pi) + std::lgamma(a) + std::lgamma(a - 0.5);
}

double logdet2(const Eigen::Matrix2d& m) {
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return det > 0.0 ? std::log(det) : std::numeric_limits<double>::quiet_NaN();
}

struct NiwParams {
  Eigen::Vector2d mu;
  double kappa;
  double nu;
  Eigen::Matrix2d lambda;
};

NiwParams resolve_prior(const NiwStats& stats, const NiwHyper& niw) {
  Eigen::Vector2d mu0 = niw.mu0_policy == Mu0Policy::ClusterCentroid
                            ? stats.mean
                            : Eigen::Vector2d(niw.mu0_fixed.x, niw.mu0_fixed.y);
  return {mu0, niw.kappa0, niw.nu0, niw.lambda0};
}

NiwParams posterior(const NiwStats& stats, const NiwParams& prior) {
  const double n = stats.n;
  const double kappa_n = prior.kappa + n;
  const Eigen::Vector2d shift = stats.mean - prior.mu;
  NiwParams post;
  post.kappa = kappa_n;
  post.nu = prior.nu + n;
  post.mu = (prior.kappa * prior.mu + n * stats.mean) / kappa_n;
  post.lambda = prior.lambda + stats.scatter + (prior.kappa * n / kappa_n) * shift * shift.transpose();
  return post;
}

// Closed-form conjugate marginal likelihood in two dimensions.
double log_marginal(const NiwStats& stats, const NiwParams& prior) {
  const NiwParams post = posterior(stats, prior);
  const double n = stats.n;
  return -n * std::log(std::numbers::pi) + lmvgamma2(post.nu / 2.0) - lmvgamma2(prior.nu / 2.0) +
         0.5 * prior.nu * logdet2(prior.lambda) - 0.5 * post.nu * logdet2(post.lambda) +
         std::log(prior.kappa) - std::log(post.kappa);
}

std::vector<Point> gather(std::span<const int> members, const LocationSet& loc) {
  std::vector<Point> pts;
  pts.reserve(members.size());
  for (int i : members) pts.push_back(loc[static_cast<std::size_t>(i)]);
  return pts;
}

double c2_max_pairwise(std::span<const Point> pts) {
  double best = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    best = std::max(best, kernels::max_distance(pts.subspan(0, i), pts[i]));
  return best;
}

double log_cohesion_from(std::span<const Point> pts, const NiwStats& stats, const CohesionConfig& cfg) {
  const std::size_t n = pts.size();
  if (n == 0) throw std::invalid_argument("log_cohesion: empty cluster");
  const double base = std::log(cfg.M) + std::lgamma(static_cast<double>(n));
  switch (cfg.kind) {
    case CohesionKind::DistancePenalty: {
      if (n == 1) return std::log(cfg.M);
      return base - c1_log_denominator(cluster_centroid_spread(pts).spread, cfg.alpha);
    }
    case CohesionKind::HardBoundary:
      if (n == 1) return std::log(cfg.M);
      return c2_max_pairwise(pts) <= cfg.a ? base : kNegInf;
    case CohesionKind::PriorPredictive:
      return base + niw_log_marginal(stats, cfg.niw);
    case CohesionKind::DoubleDip:
      return base + niw_log_double_dip(stats, cfg.niw);
  }
  throw std::logic_error("log_cohesion: unknown cohesion kind");
}

bool uses_niw(const CohesionConfig& cfg) {
  return cfg.kind == CohesionKind::PriorPredictive || cfg.kind == CohesionKind::DoubleDip;
}

}  // namespace

CohesionKind parse_cohesion_kind(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "C1") return CohesionKind::DistancePenalty;
  if (up == "C2") return CohesionKind::HardBoundary;
  if (up == "C3") return CohesionKind::PriorPredictive;
  if (up == "C4") return CohesionKind::DoubleDip;
  throw std::invalid_argument("unknown cohesion '" + std::string(name) + "' (expected C1..C4)");
}

std::string_view cohesion_name(CohesionKind kind) {
  switch (kind) {
    case CohesionKind::DistancePenalty: return "C1";
    case CohesionKind::HardBoundary: return "C2";
    case CohesionKind::PriorPredictive: return "C3";
    case CohesionKind::DoubleDip: return "C4";
  }
  return "?";
}

void NiwHyper::validate() const {
  if (!(kappa0 > 0.0)) throw std::invalid_argument("kappa0 must be positive");
  if (!(nu0 > 1.0)) throw std::invalid_argument("nu0 must exceed dimension - 1 = 1");
  if (std::abs(lambda0(0, 1) - lambda0(1, 0)) > 1e-12 * (1.0 + lambda0.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("Lambda0 must be symmetric");
  Eigen::LLT<Eigen::Matrix2d> llt(lambda0);
  if (llt.info() != Eigen::Success || !(lambda0(0, 0) > 0.0) ||
      !(lambda0(0, 0) * lambda0(1, 1) - lambda0(0, 1) * lambda0(1, 0) > 0.0))
    throw std::invalid_argument("Lambda0 must be positive definite");
}

void CohesionConfig::validate() const {
  if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("M must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
  if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
  niw.validate();
}

NiwStats NiwStats::of(std::span<const Point> pts) {
  NiwStats s;
  s.n = static_cast<int>(pts.size());
  if (pts.empty()) return s;
  for (const Point& p : pts) s.mean += Eigen::Vector2d(p.x, p.y);
  s.mean /= static_cast<double>(pts.size());
  for (const Point& p : pts) {
    const Eigen::Vector2d d(p.x - s.mean.x(), p.y - s.mean.y());
    s.scatter += d * d.transpose();
  }
  return s;
}

NiwStats NiwStats::with(Point p) const {
  NiwStats s;
  s.n = n + 1;
  const Eigen::Vector2d d(p.x - mean.x(), p.y - mean.y());
  s.mean = mean + d / static_cast<double>(s.n);
  s.scatter = scatter + (static_cast<double>(n) / static_cast<double>(s.n)) * d * d.transpose();
  return s;
}

double niw_log_marginal(const NiwStats& stats, const NiwHyper& niw) {
  if (stats.n < 1) throw std::invalid_argument("niw_log_marginal: no points");
  return log_marginal(stats, resolve_prior(stats, niw));
}

double niw_log_double_dip(const NiwStats& stats, const NiwHyper& niw) {
  if (stats.n < 1) throw std::invalid_argument("niw_log_double_dip: no points");
  return log_marginal(stats, posterior(stats, resolve_prior(stats, niw)));
}

double niw_log_marginal(std::span<const Point> pts, const NiwHyper& niw) {
  return niw_log_marginal(NiwStats::of(pts), niw);
}

double niw_log_double_dip(std::span<const Point> pts, const NiwHyper& niw) {
  return niw_log_double_dip(NiwStats::of(pts), niw);
}

double c1_log_denominator(double spread, double alpha) {
  return spread >= 1.0 ? std::lgamma(alpha * spread) : std::log(spread);
}

double log_cohesion(std::span<const Point> members, const CohesionConfig& cfg) {
  return log_cohesion_from(members, uses_niw(cfg) ? NiwStats::of(members) : NiwStats{}, cfg);
}

double log_cohesion(std::span<const int> members, const LocationSet& loc, const CohesionConfig& cfg) {
  if (members.empty()) throw std::invalid_argument("log_cohesion: empty cluster");
  if (cfg.kind == CohesionKind::HardBoundary) {
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        if (loc.distance(members[i], members[j]) > cfg.a) return kNegInf;
  }
  const auto pts = gather(members, loc);
  return log_cohesion(pts, cfg);
}

ClusterGeometry ClusterGeometry::build(std::span<const Point> pts, const CohesionConfig& cfg) {
  ClusterGeometry g;
  g.pts.assign(pts.begin(), pts.end());
  g.stats = NiwStats::of(pts);
  g.log_cohesion = pts.empty() ? 0.0 : log_cohesion_from(g.pts, g.stats, cfg);
  return g;
}

void ClusterGeometry::remove_at(std::size_t pos, const CohesionConfig& cfg) {
  if (pos >= pts.size()) throw std::out_of_range("ClusterGeometry::remove_at");
  pts[pos] = pts.back();
  pts.pop_back();
  stats = NiwStats::of(pts);
  if (pts.empty()) {
    log_cohesion = 0.0;
  } else if (cfg.kind == CohesionKind::HardBoundary) {
    log_cohesion = std::log(cfg.M) + std::lgamma(static_cast<double>(pts.size()));
  } else {
    log_cohesion = log_cohesion_from(pts, stats, cfg);
  }
}

double log_cohesion_ratio(const ClusterGeometry& cluster, Point added, const CohesionConfig& cfg) {
  const std::size_t n = cluster.pts.size();
  switch (cfg.kind) {
    case CohesionKind::DistancePenalty: {
      if (n == 0) return std::log(cfg.M);
      Point c{cluster.stats.mean.x(), cluster.stats.mean.y()};
      const double m = static_cast<double>(n + 1);
      c.x += (added.x - c.x) / m;
      c.y += (added.y - c.y) / m;
      const double spread = kernels::sum_distances(cluster.pts, c) + distance(added, c);
      const double joined = std::log(cfg.M) + std::lgamma(m) - c1_log_denominator(spread, cfg.alpha);
      return joined - cluster.log_cohesion;
    }
    case CohesionKind::HardBoundary:
      if (n == 0) return std::log(cfg.M);
      return kernels::max_distance(cluster.pts, added) <= cfg.a ? std::log(static_cast<double>(n)) : kNegInf;
    case CohesionKind::PriorPredictive:
    case CohesionKind::DoubleDip: {
      const NiwStats joined_stats = n == 0 ? NiwStats::of(std::span<const Point>(&added, 1))
                                           : cluster.stats.with(added);
      const double joined = std::log(cfg.M) + std::lgamma(static_cast<double>(n + 1)) +
                            (cfg.kind == CohesionKind::PriorPredictive
                                 ? niw_log_marginal(joined_stats, cfg.niw)
                                 : niw_log_double_dip(joined_stats, cfg.niw));
      return joined - (n == 0 ? 0.0 : cluster.log_cohesion);
    }
  }
  throw std::logic_error("log_cohesion_ratio: unknown cohesion kind");
}

double log_cohesion_ratio(std::span<const Point> members, Point added, const CohesionConfig& cfg) {
  return log_cohesion_ratio(ClusterGeometry::build(members, cfg), added, cfg);
}

double log_cohesion_ratio(std::span<const int> members, int added, const LocationSet& loc,
                          const CohesionConfig& cfg) {
  if (std::find(members.begin(), members.end(), added) != members.end())
    throw std::invalid_argument("log_cohesion_ratio: added index already in the cluster");
  const auto pts = gather(members, loc);
  return log_cohesion_ratio(pts, loc[static_cast<std::size_t>(added)], cfg);
}

}  // namespace sppm
