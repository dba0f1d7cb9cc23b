#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sppm/cohesion.hpp"
#include "sppm/cps.hpp"
#include "sppm/dataset.hpp"
#include "sppm/mcmc.hpp"

namespace sppm {

/// Jps: spatial structure in the partition prior only,
///   y_i = mu*_{c_i} + e_i,  e_i ~ N2(0, Sigma).
/// Jls: adds a coregionalized field theta(s) = A(gamma) theta~(s) with
///   A = [[1, gamma], [gamma, 1]] and independent exponential GPs theta~_j
///   with partial sill tau2_j and decay phi_j.
/// Priors: mu*_h ~ N2(mu0, T), mu0 ~ N2(0, mu0_sd^2 I), Sigma ~ IW(2, I),
/// T ~ IW(2, I), tau2_j ~ Gamma(1, 1), phi_j ~ U(0.5, 30), gamma ~ U(0, 1).
enum class JointMode { Jps, Jls };

struct JointSpec {
  CohesionConfig cohesion;
  JointMode mode = JointMode::Jps;
  double mu0_sd = 10.0;
  double sigma_df = 2.0;
  Eigen::Matrix2d sigma_scale = Eigen::Matrix2d::Identity();
  double t_df = 2.0;
  Eigen::Matrix2d t_scale = Eigen::Matrix2d::Identity();
  double tau2_shape = 1.0;
  double tau2_rate = 1.0;
  double phi_lo = 0.5;
  double phi_hi = 30.0;
  /// Hold gamma or both partial sills at a fixed value instead of sampling.
  std::optional<double> fixed_gamma;
  std::optional<double> fixed_tau2;
  bool prior_only = false;

  void validate() const;
};

struct JointDraw {
  std::vector<Eigen::Vector2d> mu_star;
  Eigen::Vector2d mu0 = Eigen::Vector2d::Zero();
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d t = Eigen::Matrix2d::Identity();
  // Jls only.
  Eigen::Vector2d tau2 = Eigen::Vector2d::Zero();
  Eigen::Vector2d phi = Eigen::Vector2d::Zero();
  double gamma = 0.0;
  /// n x 2 latent fields theta~ at the training sites (empty for Jps).
  Eigen::MatrixXd latent;

  /// n x 2 field theta = latent A' (zero for Jps).
  Eigen::MatrixXd field(Eigen::Index n) const;
};

using JointSamples = PosteriorSamples<JointDraw>;

/// Requires a two-column response. Random-walk names: "tau2_1", "tau2_2"
/// (log scale), "phi_1", "phi_2", "gamma".
JointSamples fit_joint(const Dataset& data, const JointSpec& spec, const McmcConfig& cfg);

Eigen::VectorXd joint_loglik(const Dataset& data, const Partition& partition, const JointDraw& draw);

/// Predictive summaries of y1 at new sites. With `observed_y2` (one value
/// per site) draws come from y1 | y2; otherwise y2 is drawn first.
PredictionSummary predict_joint(const Dataset& train, const JointSpec& spec, const JointSamples& samples,
                                std::span<const Point> new_sites, std::optional<Eigen::VectorXd> observed_y2,
                                Rng& rng);

/// Mean and variance of y1 given y2 under N2(mean, sigma):
/// mean1 + eta s1/s2 (y2 - mean2) and s1^2 (1 - eta^2).
std::pair<double, double> conditional_y1(const Eigen::Vector2d& mean, const Eigen::Matrix2d& sigma, double y2);

/// Fitted bivariate means mu*_{c_i} + theta_i averaged over draws.
Eigen::MatrixXd joint_fitted(const Dataset& data, const JointSamples& samples);

}  // namespace sppm
