#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sppm/cohesion.hpp"
#include "sppm/dataset.hpp"
#include "sppm/mcmc.hpp"

namespace sppm {

/// Conditional model with the spatial structure in the partition prior:
///   y_i = mu*_{c_i} + x_i' beta + e_i,  e_i ~ N(0, sigma^2),
///   mu*_h ~ N(mu0, sigma0^2),  mu0 ~ N(0, mu0_sd^2),  beta_j ~ N(0, beta_sd^2),
///   sigma ~ U(0, sigma_max),  sigma0 ~ U(0, sigma0_max).
struct CpsSpec {
  CohesionConfig cohesion;
  double sigma_max = 10.0;
  double sigma0_max = 10.0;
  double beta_sd = 10.0;
  double mu0_sd = 10.0;
  /// Drop the likelihood from every update so the chain targets the prior.
  bool prior_only = false;

  void validate() const;
};

struct CpsDraw {
  /// Cluster means in canonical label order.
  std::vector<double> mu_star;
  Eigen::VectorXd beta;
  double sigma = 0.0;
  double mu0 = 0.0;
  double sigma0 = 0.0;
};

using CpsSamples = PosteriorSamples<CpsDraw>;

/// Requires a one-column response. Random-walk names: "sigma", "sigma0".
CpsSamples fit_cps(const Dataset& data, const CpsSpec& spec, const McmcConfig& cfg);

/// Log-likelihood row for one draw: log N(y_i | mu*_{c_i} + x_i' beta, sigma^2).
Eigen::VectorXd cps_loglik(const Dataset& data, const Partition& partition, const CpsDraw& draw);

/// Posterior predictive means (Rao-Blackwellized over the allocation) and
/// central 90% intervals on the working scale.
struct PredictionSummary {
  std::vector<double> mean;
  std::vector<double> lo90;
  std::vector<double> hi90;
};

/// Log allocation weights of a new site: existing clusters get
/// log C(S_h u {0}) - log C(S_h), a new cluster log C({0}).
std::vector<double> new_site_log_weights(const Dataset& train, const Partition& partition, Point site,
                                         const CohesionConfig& cohesion);

PredictionSummary predict_cps(const Dataset& train, const CpsSpec& spec, const CpsSamples& samples,
                              std::span<const Point> new_sites, const Eigen::MatrixXd& new_x, Rng& rng);

/// Fitted means mu*_{c_i} + x_i' beta averaged over draws.
Eigen::VectorXd cps_fitted(const Dataset& data, const CpsSamples& samples);

}  // namespace sppm
