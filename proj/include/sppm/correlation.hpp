#pragma once

#include <span>

#include <Eigen/Dense>

namespace sppm {

/// tau2 * exp(-phi * d). Throws std::invalid_argument for d < 0.
double exp_cov(double d, double tau2, double phi);

/// Distance at which the exponential correlation drops to e^-3.
inline double effective_range(double phi) { return 3.0 / phi; }
inline double decay_from_range(double range) { return 3.0 / range; }

/// Marginal correlation under cluster-specific regression coefficients
/// beta*_h ~ N(mu, T) and no spatial random effect:
///   x_i' T x_j Pr(c_i = c_j) / sqrt((x_i' T x_i + s2)(x_j' T x_j + s2)).
double corr_local_regression(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, const Eigen::MatrixXd& T,
                             double sigma2, double p_same);

/// Adds a global GP effect with partial sill lambda2 and correlation h_ij
/// between the two sites.
double corr_local_regression_global_gp(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                                       const Eigen::MatrixXd& T, double sigma2, double lambda2, double h_ij,
                                       double p_same);

/// One cluster label's contribution under cluster-specific GP effects.
struct ClusterGpTerm {
  double tau2 = 0.0;    // partial sill of the cluster's GP
  double h_ij = 0.0;    // GP correlation between the two sites
  double p_joint = 0.0; // Pr(c_i = c_j = h)
  double p_i = 0.0;     // Pr(c_i = h)
  double p_j = 0.0;     // Pr(c_j = h)
};

/// Global regression beta ~ N(mu, T) with independent cluster-specific GPs:
///   (x_i' T x_j + sum_h tau2_h H_h,ij p_joint(h)) /
///   sqrt(s2 + x_i' T x_i + sum_h tau2_h p_i(h)) sqrt(s2 + x_j' T x_j + sum_h tau2_h p_j(h)).
double corr_global_regression_local_gp(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                                       const Eigen::MatrixXd& T, double sigma2,
                                       std::span<const ClusterGpTerm> clusters);

}  // namespace sppm
