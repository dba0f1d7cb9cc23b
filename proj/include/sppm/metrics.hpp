#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sppm/spatial_partition.hpp"

namespace sppm {

/// Rows index posterior draws, columns observations: L(t, i) = log f(y_i | theta_t).
using LoglikMatrix = Eigen::MatrixXd;

/// Sum over observations of the log conditional predictive ordinate, each a
/// harmonic mean of the likelihood over draws. Throws for an empty matrix or
/// non-finite entries.
double lpml(const LoglikMatrix& L);

/// Per-observation log CPO.
Eigen::VectorXd log_cpo(const LoglikMatrix& L);

/// -2 (lppd - p_waic) with the variance penalty (divisor T - 1).
/// Throws std::invalid_argument for fewer than two draws.
double waic(const LoglikMatrix& L);

double mse(std::span<const double> y, std::span<const double> yhat);
inline double mspe(std::span<const double> y_test, std::span<const double> yhat_test) {
  return mse(y_test, yhat_test);
}

/// Hubert-Arabie adjusted Rand index. When the maximum index equals the
/// expected index the value is 1 for identical partitions and 0 otherwise
/// (for example one cluster against all singletons).
double adjusted_rand(const Partition& a, const Partition& b);

/// Empirical Pr(c_i = c_j) over the draws.
Eigen::MatrixXd coclustering(std::span<const Partition> draws);

/// Index of the draw minimizing sum_{i<j} (delta_ij - pihat_ij)^2, earliest on ties.
std::size_t dahl_index(std::span<const Partition> draws);
Partition dahl_estimate(std::span<const Partition> draws);

}  // namespace sppm
