#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "sppm/cohesion.hpp"
#include "sppm/rng.hpp"
#include "sppm/spatial_partition.hpp"

namespace sppm {

/// One draw from the sequential predictive proposal with its log importance
/// weight log pi(rho) - log q(rho | order), pi the unnormalized prior.
struct WeightedPartitionDraw {
  Partition partition;
  double log_weight = 0.0;
};

/// Allocates the locations one at a time in a random order. A location
/// joins cluster h with probability proportional to C(S_h u {i}) / C(S_h)
/// or opens a cluster with probability proportional to C({i}), which is M
/// for C1 and C2.
WeightedPartitionDraw sample_partition_sequential(const LocationSet& loc, const CohesionConfig& cfg,
                                                  Rng& rng);

/// Exact prior probabilities by enumeration of all Bell(n) partitions.
/// Throws std::out_of_range for n > 12.
std::map<Partition, double> exact_prior(const LocationSet& loc, const CohesionConfig& cfg);

/// Pr(c_i = c_j) from an exact prior.
Eigen::MatrixXd coclustering_from_exact(const std::map<Partition, double>& prior, std::size_t n);

struct PriorSummary {
  double mean_k = 0.0;
  double mean_singletons = 0.0;
  double mean_max_cluster = 0.0;
  double mc_se_k = 0.0;
  double mc_se_singletons = 0.0;
  double mc_se_max_cluster = 0.0;
  double ess = 0.0;
  int n_draws = 0;
  /// Effective sample size below 50.
  bool low_ess = false;
};

struct PriorSimulation {
  PriorSummary summary;
  Eigen::MatrixXd coclustering;
};

/// Self-normalized importance-sampling estimates from n_draws sequential
/// draws. Throws std::invalid_argument for n_draws < 1.
PriorSimulation simulate_prior(const LocationSet& loc, const CohesionConfig& cfg, int n_draws, Rng& rng);

PriorSummary prior_summaries(const LocationSet& loc, const CohesionConfig& cfg, int n_draws, Rng& rng);
Eigen::MatrixXd coclustering_matrix(const LocationSet& loc, const CohesionConfig& cfg, int n_draws, Rng& rng);

/// Normalized weights exp(w_i - logsumexp(w)).
std::vector<double> normalize_log_weights(const std::vector<double>& log_weights);

}  // namespace sppm
