#include "sppm/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sppm {

namespace {

double log_sum_exp(std::span<const double> v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace

std::vector<double> normalize_log_weights(const std::vector<double>& log_weights) {
  const double lse = log_sum_exp(log_weights);
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - lse);
  return w;
}

WeightedPartitionDraw sample_partition_sequential(const LocationSet& loc, const CohesionConfig& cfg,
                                                  Rng& rng) {
  const std::size_t n = loc.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<ClusterGeometry> clusters;
  std::vector<int> labels(n, -1);
  std::vector<double> logw;
  double log_q = 0.0;
  for (int i : order) {
    const Point p = loc[static_cast<std::size_t>(i)];
    logw.resize(clusters.size() + 1);
    for (std::size_t h = 0; h < clusters.size(); ++h) logw[h] = log_cohesion_ratio(clusters[h], p, cfg);
    logw.back() = log_cohesion_ratio(ClusterGeometry{}, p, cfg);
    const double lse = log_sum_exp(logw);
    double u = uniform01(rng);
    std::size_t pick = logw.size() - 1;
    for (std::size_t h = 0; h < logw.size(); ++h) {
      u -= std::exp(logw[h] - lse);
      if (u < 0.0) {
        pick = h;
        break;
      }
    }
    // Guard against landing on a zero-probability option through rounding.
    while (!std::isfinite(logw[pick])) pick = (pick + 1) % logw.size();
    log_q += logw[pick] - lse;
    if (pick == clusters.size()) clusters.emplace_back();
    clusters[pick].add(p, logw[pick]);
    labels[static_cast<std::size_t>(i)] = static_cast<int>(pick);
  }
  double log_target = 0.0;
  for (const auto& c : clusters) log_target += c.log_cohesion;
  return {Partition(labels), log_target - log_q};
}

std::map<Partition, double> exact_prior(const LocationSet& loc, const CohesionConfig& cfg) {
  const int n = static_cast<int>(loc.size());
  PartitionEnumerator it(n);
  std::vector<Partition> parts;
  std::vector<double> logp;
  do {
    Partition p = it.current();
    double lp = 0.0;
    for (const auto& members : p.clusters()) {
      lp += log_cohesion(members, loc, cfg);
      if (!std::isfinite(lp)) break;
    }
    parts.push_back(std::move(p));
    logp.push_back(lp);
  } while (it.next());
  const auto w = normalize_log_weights(logp);
  std::map<Partition, double> out;
  for (std::size_t i = 0; i < parts.size(); ++i) out.emplace(std::move(parts[i]), w[i]);
  return out;
}

Eigen::MatrixXd coclustering_from_exact(const std::map<Partition, double>& prior, std::size_t n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& [part, prob] : prior)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (part.same_cluster(i, j)) m(i, j) += prob;
  return m;
}

PriorSimulation simulate_prior(const LocationSet& loc, const CohesionConfig& cfg, int n_draws, Rng& rng) {
  if (n_draws < 1) throw std::invalid_argument("simulate_prior: n_draws must be >= 1");
  cfg.validate();
  const std::size_t n = loc.size();
  std::vector<double> logw(static_cast<std::size_t>(n_draws));
  std::vector<double> k(logw.size()), sing(logw.size()), mx(logw.size());
  std::vector<Partition> draws;
  draws.reserve(logw.size());
  for (std::size_t t = 0; t < logw.size(); ++t) {
    auto d = sample_partition_sequential(loc, cfg, rng);
    logw[t] = d.log_weight;
    k[t] = d.partition.num_clusters();
    sing[t] = d.partition.num_singletons();
    mx[t] = d.partition.max_cluster_size();
    draws.push_back(std::move(d.partition));
  }
  const auto w = normalize_log_weights(logw);

  auto weighted = [&](const std::vector<double>& v, double& mean, double& se) {
    mean = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) mean += w[t] * v[t];
    double var = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) var += w[t] * w[t] * (v[t] - mean) * (v[t] - mean);
    se = std::sqrt(var);
  };

  PriorSimulation sim;
  PriorSummary& s = sim.summary;
  weighted(k, s.mean_k, s.mc_se_k);
  weighted(sing, s.mean_singletons, s.mc_se_singletons);
  weighted(mx, s.mean_max_cluster, s.mc_se_max_cluster);
  double sum_w2 = 0.0;
  for (double x : w) sum_w2 += x * x;
  s.ess = 1.0 / sum_w2;
  s.n_draws = n_draws;
  s.low_ess = s.ess < 50.0;

  sim.coclustering = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < draws.size(); ++t) {
    if (w[t] == 0.0) continue;
    for (const auto& members : draws[t].clusters())
      for (int i : members)
        for (int j : members) sim.coclustering(i, j) += w[t];
  }
  return sim;
}

PriorSummary prior_summaries(const LocationSet& loc, const CohesionConfig& cfg, int n_draws, Rng& rng) {
  return simulate_prior(loc, cfg, n_draws, rng).summary;
}

Eigen::MatrixXd coclustering_matrix(const LocationSet& loc, const CohesionConfig& cfg, int n_draws, Rng& rng) {
  return simulate_prior(loc, cfg, n_draws, rng).coclustering;
}

}  // namespace sppm
