#include "sppm/metrics.hpp"

#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <map>
#include <stdexcept>

namespace sppm {

namespace {

void check_loglik(const LoglikMatrix& L) {
  if (L.rows() < 1 || L.cols() < 1) throw std::invalid_argument("log-likelihood matrix is empty");
  if (!L.allFinite()) throw std::invalid_argument("log-likelihood matrix has non-finite entries");
}

double log_mean_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double mx = v.maxCoeff();
  return mx + std::log((v.array() - mx).exp().sum()) - std::log(static_cast<double>(v.size()));
}

double choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

Eigen::VectorXd log_cpo(const LoglikMatrix& L) {
  check_loglik(L);
  Eigen::VectorXd out(L.cols());
  // CPO_i^{-1} = mean_t exp(-L(t, i))
  for (Eigen::Index i = 0; i < L.cols(); ++i) out(i) = -log_mean_exp(-L.col(i));
  return out;
}

double lpml(const LoglikMatrix& L) { return log_cpo(L).sum(); }

double waic(const LoglikMatrix& L) {
  check_loglik(L);
  if (L.rows() < 2) throw std::invalid_argument("waic needs at least two draws");
  const double T = static_cast<double>(L.rows());
  double lppd = 0.0, penalty = 0.0;
  for (Eigen::Index i = 0; i < L.cols(); ++i) {
    const auto col = L.col(i);
    lppd += log_mean_exp(col);
    const double m = col.mean();
    penalty += (col.array() - m).square().sum() / (T - 1.0);
  }
  return -2.0 * (lppd - penalty);
}

double mse(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw std::invalid_argument("mse: length mismatch");
  if (y.empty()) throw std::invalid_argument("mse: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return s / static_cast<double>(y.size());
}

double adjusted_rand(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand: partitions differ in size");
  const std::size_t n = a.size();
  std::map<std::pair<int, int>, double> table;
  for (std::size_t i = 0; i < n; ++i) table[{a.label(i), b.label(i)}] += 1.0;
  double index = 0.0;
  for (const auto& [key, c] : table) index += choose2(c);
  double rows = 0.0, cols = 0.0;
  for (const auto& m : a.clusters()) rows += choose2(static_cast<double>(m.size()));
  for (const auto& m : b.clusters()) cols += choose2(static_cast<double>(m.size()));
  const double total = choose2(static_cast<double>(n));
  const double expected = total > 0.0 ? rows * cols / total : 0.0;
  const double max_index = 0.5 * (rows + cols);
  if (max_index - expected == 0.0) {
    if (index == max_index) return a == b ? 1.0 : 0.0;
    std::cerr << "warning: adjusted Rand index undefined for these partitions; returning 0\n";
    return 0.0;
  }
  return (index - expected) / (max_index - expected);
}

Eigen::MatrixXd coclustering(std::span<const Partition> draws) {
  if (draws.empty()) throw std::invalid_argument("coclustering: no draws");
  const auto n = static_cast<Eigen::Index>(draws.front().size());
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(n, n);
  for (const auto& p : draws) {
    if (static_cast<Eigen::Index>(p.size()) != n) throw std::invalid_argument("coclustering: size mismatch");
    for (const auto& members : p.clusters())
      for (int i : members)
        for (int j : members) pi(i, j) += 1.0;
  }
  return pi / static_cast<double>(draws.size());
}

std::size_t dahl_index(std::span<const Partition> draws) {
  if (draws.empty()) throw std::invalid_argument("dahl_index: no draws");
  // Scores scaled by T^2 are integers, so ties are detected exactly.
  const std::size_t n = draws.front().size();
  const auto T = static_cast<std::int64_t>(draws.size());
  std::vector<std::int64_t> counts(n * n, 0);
  for (const auto& p : draws) {
    if (p.size() != n) throw std::invalid_argument("dahl_index: size mismatch");
    for (const auto& members : p.clusters())
      for (int i : members)
        for (int j : members) ++counts[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)];
  }
  std::size_t best = 0;
  std::int64_t best_score = std::numeric_limits<std::int64_t>::max();
  for (std::size_t t = 0; t < draws.size(); ++t) {
    const auto labels = draws[t].labels();
    std::int64_t score = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::int64_t d = (labels[i] == labels[j] ? T : 0) - counts[i * n + j];
        score += d * d;
      }
    if (score < best_score) {
      best_score = score;
      best = t;
    }
  }
  return best;
}

Partition dahl_estimate(std::span<const Partition> draws) { return draws[dahl_index(draws)]; }

}  // namespace sppm
