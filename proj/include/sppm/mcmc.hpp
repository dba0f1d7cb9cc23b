#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sppm/rng.hpp"
#include "sppm/spatial_partition.hpp"

namespace sppm {

enum class InitKind { OneCluster, KMeans };

struct McmcConfig {
  int n_iter = 2000;
  int burnin = 1000;
  int thin = 1;
  /// Auxiliary components per allocation step.
  int neal_m = 1;
  std::uint64_t seed = 1;
  /// Initial random-walk step sizes by parameter name; unspecified names
  /// use built-in defaults.
  std::map<std::string, double> rw_scales;
  /// Robbins-Monro tuning of the step sizes during burn-in.
  bool adapt = true;
  InitKind init = InitKind::OneCluster;
  int init_clusters = 4;

  /// Throws std::invalid_argument unless 0 <= burnin < n_iter, thin >= 1
  /// and neal_m >= 1.
  void validate() const;
  int num_kept() const { return (n_iter - burnin) / thin; }
  bool keep(int iter) const { return iter >= burnin && (iter - burnin + 1) % thin == 0; }
};

/// Post-burn-in acceptance rate of one random-walk update.
struct AcceptanceStat {
  long accepted = 0;
  long proposed = 0;
  double final_scale = 0.0;
  double rate() const { return proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0; }
};

/// Partition draws, parameter records and the T x n log-likelihood matrix.
template <class Draw>
struct PosteriorSamples {
  std::vector<Partition> partitions;
  std::vector<Draw> params;
  Eigen::MatrixXd loglik;
  std::map<std::string, AcceptanceStat> acceptance;

  std::size_t num_draws() const { return partitions.size(); }
};

/// Symmetric random walk on (lo, hi) with reflection at the bounds.
class ReflectedWalk {
 public:
  ReflectedWalk(std::string name, double scale, double lo, double hi);

  /// Proposes from `current`; the caller reports the outcome to record().
  double propose(double current, Rng& rng) const;
  void record(bool accepted, int iter, const McmcConfig& cfg);
  const std::string& name() const { return name_; }
  AcceptanceStat stat() const { return {accepted_, proposed_, scale_}; }

 private:
  std::string name_;
  double scale_;
  double lo_, hi_;
  long accepted_ = 0;
  long proposed_ = 0;
};

double reflect_into(double v, double lo, double hi);

/// N(mean, cov) draw via Cholesky; throws std::runtime_error if cov is not SPD.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng);
/// Draw from N(Q^{-1} b, Q^{-1}) given the precision Q and linear term b.
Eigen::VectorXd sample_mvn_canonical(const Eigen::MatrixXd& precision, const Eigen::VectorXd& b, Rng& rng);
/// Inverse-Wishart IW(nu, scale) with density proportional to
/// |X|^{-(nu+p+1)/2} exp(-tr(scale X^{-1}) / 2), sampled with the Bartlett
/// decomposition of the matching Wishart.
Eigen::MatrixXd sample_inv_wishart(double nu, const Eigen::MatrixXd& scale, Rng& rng);

double log_normal_pdf(double y, double mean, double var);
/// log N2(y | mean, cov) given the Cholesky factor of cov.
double log_mvn_pdf(const Eigen::VectorXd& y, const Eigen::VectorXd& mean, const Eigen::LLT<Eigen::MatrixXd>& cov_llt);

/// Draws an index with probability proportional to exp(logw[i]).
std::size_t sample_log_weights(const std::vector<double>& logw, Rng& rng);

/// Type-7 sample quantile of `v` (sorted in place).
double quantile_inplace(std::vector<double>& v, double q);

/// Lloyd's algorithm on the locations; returns k-cluster labels.
std::vector<int> kmeans_labels(const LocationSet& loc, int k, Rng& rng);

}  // namespace sppm
