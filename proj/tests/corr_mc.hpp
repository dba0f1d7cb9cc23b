#pragma once

// Monte Carlo draws of (y_1, y_2) from the generative models behind the
// closed-form correlations, returning the sample correlation.

#include <cmath>
#include <span>

#include <Eigen/Dense>

#include "sppm/correlation.hpp"
#include "sppm/rng.hpp"

namespace sppm::test {

struct PairMoments {
  double s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
  long n = 0;
  void add(double a, double b) {
    s1 += a;
    s2 += b;
    s11 += a * a;
    s22 += b * b;
    s12 += a * b;
    ++n;
  }
  double corr() const {
    const double m1 = s1 / n, m2 = s2 / n;
    return (s12 / n - m1 * m2) / std::sqrt((s11 / n - m1 * m1) * (s22 / n - m2 * m2));
  }
};

inline Eigen::VectorXd draw_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol, Rng& rng) {
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = std_normal(rng);
  return mean + chol * z;
}

/// Cluster-specific coefficients beta*_h ~ N(mu, T) shared when c_1 = c_2,
/// plus an optional global GP with sill lambda2 and correlation h_ij.
inline double mc_local_regression(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, const Eigen::VectorXd& mu,
                                  const Eigen::MatrixXd& T, double sigma2, double lambda2, double h_ij,
                                  double p_same, long reps, Rng& rng) {
  const Eigen::MatrixXd chol = T.llt().matrixL();
  const double sd = std::sqrt(sigma2);
  const double g = std::sqrt(lambda2), r = std::sqrt(std::max(0.0, 1.0 - h_ij * h_ij));
  PairMoments m;
  for (long t = 0; t < reps; ++t) {
    const bool same = uniform01(rng) < p_same;
    const Eigen::VectorXd b1 = draw_mvn(mu, chol, rng);
    const Eigen::VectorXd b2 = same ? b1 : draw_mvn(mu, chol, rng);
    const double z1 = std_normal(rng), z2 = std_normal(rng);
    const double th1 = g * z1, th2 = g * (h_ij * z1 + r * z2);
    m.add(xi.dot(b1) + th1 + sd * std_normal(rng), xj.dot(b2) + th2 + sd * std_normal(rng));
  }
  return m.corr();
}

/// Global coefficients beta ~ N(mu, T) and independent GPs per cluster label.
/// `joint(h, k)` is Pr(c_1 = h, c_2 = k).
inline double mc_global_regression_local_gp(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                                            const Eigen::VectorXd& mu, const Eigen::MatrixXd& T, double sigma2,
                                            std::span<const double> tau2, std::span<const double> h,
                                            const Eigen::MatrixXd& joint, long reps, Rng& rng) {
  const Eigen::MatrixXd chol = T.llt().matrixL();
  const double sd = std::sqrt(sigma2);
  const Eigen::Index L = joint.rows();
  PairMoments m;
  for (long t = 0; t < reps; ++t) {
    double u = uniform01(rng);
    Eigen::Index c1 = L - 1, c2 = L - 1;
    for (Eigen::Index a = 0; a < L && u >= 0.0; ++a)
      for (Eigen::Index b = 0; b < L; ++b) {
        u -= joint(a, b);
        if (u < 0.0) {
          c1 = a;
          c2 = b;
          break;
        }
      }
    const Eigen::VectorXd beta = draw_mvn(mu, chol, rng);
    const double z1 = std_normal(rng), z2 = std_normal(rng);
    const double th1 = std::sqrt(tau2[c1]) * z1;
    double th2;
    if (c1 == c2) {
      const double hh = h[c1];
      th2 = std::sqrt(tau2[c2]) * (hh * z1 + std::sqrt(1.0 - hh * hh) * z2);
    } else {
      th2 = std::sqrt(tau2[c2]) * z2;
    }
    m.add(xi.dot(beta) + th1 + sd * std_normal(rng), xj.dot(beta) + th2 + sd * std_normal(rng));
  }
  return m.corr();
}

}  // namespace sppm::test
