#include "sppm/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace sppm {

void McmcConfig::validate() const {
  if (n_iter < 1) throw std::invalid_argument("n_iter must be positive");
  if (burnin < 0 || burnin >= n_iter) throw std::invalid_argument("burnin must satisfy 0 <= burnin < n_iter");
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (neal_m < 1) throw std::invalid_argument("neal_m must be >= 1");
  if (init_clusters < 1) throw std::invalid_argument("init_clusters must be >= 1");
  for (const auto& [k, v] : rw_scales)
    if (!(v > 0.0)) throw std::invalid_argument("random-walk scale '" + k + "' must be positive");
}

double reflect_into(double v, double lo, double hi) {
  const double width = hi - lo;
  // Fold onto [lo, hi] as a mirror of period 2 * width.
  double t = std::fmod(v - lo, 2.0 * width);
  if (t < 0.0) t += 2.0 * width;
  return t <= width ? lo + t : hi - (t - width);
}

ReflectedWalk::ReflectedWalk(std::string name, double scale, double lo, double hi)
    : name_(std::move(name)), scale_(scale), lo_(lo), hi_(hi) {
  if (!(scale > 0.0) || !(hi > lo)) throw std::invalid_argument("invalid random-walk settings for " + name_);
}

double ReflectedWalk::propose(double current, Rng& rng) const {
  return reflect_into(current + scale_ * std_normal(rng), lo_, hi_);
}

void ReflectedWalk::record(bool accepted, int iter, const McmcConfig& cfg) {
  if (iter < cfg.burnin) {
    if (cfg.adapt) {
      const double step = std::min(0.5, 1.0 / std::sqrt(static_cast<double>(iter) + 1.0));
      scale_ *= std::exp(step * ((accepted ? 1.0 : 0.0) - 0.44));
      scale_ = std::clamp(scale_, 1e-6 * (hi_ - lo_), 10.0 * (hi_ - lo_));
    }
    return;
  }
  ++proposed_;
  if (accepted) ++accepted_;
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::runtime_error("sample_mvn: covariance is not positive definite");
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = std_normal(rng);
  return mean + llt.matrixL() * z;
}

Eigen::VectorXd sample_mvn_canonical(const Eigen::MatrixXd& precision, const Eigen::VectorXd& b, Rng& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw std::runtime_error("sample_mvn_canonical: precision is not positive definite");
  Eigen::VectorXd z(b.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = std_normal(rng);
  const Eigen::VectorXd mean = llt.solve(b);
  return mean + llt.matrixU().solve(z);
}

Eigen::MatrixXd sample_inv_wishart(double nu, const Eigen::MatrixXd& scale, Rng& rng) {
  const Eigen::Index p = scale.rows();
  if (!(nu > static_cast<double>(p) - 1.0)) throw std::invalid_argument("sample_inv_wishart: nu too small");
  // X^{-1} ~ Wishart(nu, scale^{-1}); scale^{-1} = (L L')^{-1} = L^{-T} L^{-1}.
  Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success) throw std::runtime_error("sample_inv_wishart: scale is not positive definite");
  Eigen::MatrixXd bartlett = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    std::chi_squared_distribution<double> chi(nu - static_cast<double>(i));
    bartlett(i, i) = std::sqrt(chi(rng));
    for (Eigen::Index j = 0; j < i; ++j) bartlett(i, j) = std_normal(rng);
  }
  // Wishart draw W = C B B' C' with C C' = scale^{-1}; take C = L^{-T}.
  const Eigen::MatrixXd linv = llt.matrixL().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd c = linv.transpose() * bartlett;
  const Eigen::MatrixXd w = c * c.transpose();
  Eigen::MatrixXd x = w.llt().solve(Eigen::MatrixXd::Identity(p, p));
  return 0.5 * (x + x.transpose());
}

double log_normal_pdf(double y, double mean, double var) {
  const double d = y - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

double log_mvn_pdf(const Eigen::VectorXd& y, const Eigen::VectorXd& mean, const Eigen::LLT<Eigen::MatrixXd>& cov_llt) {
  const Eigen::VectorXd z = cov_llt.matrixL().solve(y - mean);
  const Eigen::MatrixXd& l = cov_llt.matrixLLT();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += 2.0 * std::log(l(i, i));
  return -0.5 * (static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi) + logdet + z.squaredNorm());
}

std::size_t sample_log_weights(const std::vector<double>& logw, Rng& rng) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : logw) mx = std::max(mx, v);
  if (!std::isfinite(mx)) throw std::runtime_error("all allocation weights are zero");
  double total = 0.0;
  for (double v : logw) total += std::exp(v - mx);
  double u = uniform01(rng) * total;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    const double w = std::exp(logw[i] - mx);
    if (w > 0.0) last_positive = i;
    if (u < w) return i;
    u -= w;
  }
  return last_positive;
}

double quantile_inplace(std::vector<double>& v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<int> kmeans_labels(const LocationSet& loc, int k, Rng& rng) {
  const std::size_t n = loc.size();
  k = std::min<int>(k, static_cast<int>(n));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<Point> centers;
  for (int h = 0; h < k; ++h) centers.push_back(loc[idx[static_cast<std::size_t>(h)]]);
  std::vector<int> labels(n, 0);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      for (int h = 1; h < k; ++h)
        if (distance(loc[i], centers[h]) < distance(loc[i], centers[best])) best = h;
      if (best != labels[i]) changed = true;
      labels[i] = best;
    }
    std::vector<Point> sum(static_cast<std::size_t>(k), Point{0.0, 0.0});
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[labels[i]].x += loc[i].x;
      sum[labels[i]].y += loc[i].y;
      ++count[labels[i]];
    }
    for (int h = 0; h < k; ++h)
      if (count[h] > 0) centers[h] = {sum[h].x / count[h], sum[h].y / count[h]};
    if (!changed && iter > 0) break;
  }
  return labels;
}

}  // namespace sppm
