#include "sppm/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sppm {

namespace {

void check_spd(const Eigen::MatrixXd& T, Eigen::Index p) {
  if (T.rows() != p || T.cols() != p) throw std::invalid_argument("T must be p x p");
  if (!T.isApprox(T.transpose(), 1e-12)) throw std::invalid_argument("T must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(T);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("T must be positive definite");
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

double clamp_corr(double r) { return std::clamp(r, -1.0, 1.0); }

}  // namespace

double exp_cov(double d, double tau2, double phi) {
  if (!(d >= 0.0)) throw std::invalid_argument("exp_cov: negative distance");
  return tau2 * std::exp(-phi * d);
}

double corr_local_regression(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, const Eigen::MatrixXd& T,
                             double sigma2, double p_same) {
  return corr_local_regression_global_gp(xi, xj, T, sigma2, 0.0, 0.0, p_same);
}

double corr_local_regression_global_gp(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                                       const Eigen::MatrixXd& T, double sigma2, double lambda2, double h_ij,
                                       double p_same) {
  if (xi.size() != xj.size()) throw std::invalid_argument("covariate vectors differ in length");
  check_spd(T, xi.size());
  check_probability(p_same, "p_same");
  if (std::abs(h_ij) > 1.0) throw std::invalid_argument("|H_ij| must not exceed 1");
  if (!(sigma2 > 0.0) || lambda2 < 0.0) throw std::invalid_argument("variances must be positive");
  const double cov = lambda2 * h_ij + xi.dot(T * xj) * p_same;
  const double vi = xi.dot(T * xi) + lambda2 + sigma2;
  const double vj = xj.dot(T * xj) + lambda2 + sigma2;
  return clamp_corr(cov / std::sqrt(vi * vj));
}

double corr_global_regression_local_gp(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                                       const Eigen::MatrixXd& T, double sigma2,
                                       std::span<const ClusterGpTerm> clusters) {
  if (xi.size() != xj.size()) throw std::invalid_argument("covariate vectors differ in length");
  check_spd(T, xi.size());
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  double sum_i = 0.0, sum_j = 0.0;
  double cov_theta = 0.0, var_i = 0.0, var_j = 0.0;
  for (const auto& c : clusters) {
    check_probability(c.p_joint, "p_joint");
    check_probability(c.p_i, "p_i");
    check_probability(c.p_j, "p_j");
    if (c.p_joint > std::min(c.p_i, c.p_j) + 1e-12)
      throw std::invalid_argument("Pr(c_i = c_j = h) exceeds a marginal Pr(c = h)");
    if (c.tau2 < 0.0 || std::abs(c.h_ij) > 1.0) throw std::invalid_argument("invalid cluster GP term");
    sum_i += c.p_i;
    sum_j += c.p_j;
    cov_theta += c.tau2 * c.h_ij * c.p_joint;
    var_i += c.tau2 * c.p_i;
    var_j += c.tau2 * c.p_j;
  }
  if (std::abs(sum_i - 1.0) > 1e-8 || std::abs(sum_j - 1.0) > 1e-8)
    throw std::invalid_argument("cluster membership probabilities must sum to 1");
  const double cov = xi.dot(T * xj) + cov_theta;
  const double vi = sigma2 + xi.dot(T * xi) + var_i;
  const double vj = sigma2 + xj.dot(T * xj) + var_j;
  return clamp_corr(cov / std::sqrt(vi * vj));
}

}  // namespace sppm
