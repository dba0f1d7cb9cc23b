#include "sppm/joint.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>


namespace sppm {

namespace {

struct Cluster {
  std::vector<int> idx;
  ClusterGeometry geo;
  Eigen::Vector2d mu = Eigen::Vector2d::Zero();
};

double scale_or(const McmcConfig& cfg, const std::string& name, double fallback) {
  const auto it = cfg.rw_scales.find(name);
  return it == cfg.rw_scales.end() ? fallback : it->second;
}

Eigen::Matrix2d coregion(double gamma) {
  Eigen::Matrix2d a;
  a << 1.0, gamma, gamma, 1.0;
  return a;
}

// Bivariate normal with cached inverse and log-determinant.
struct Gauss2 {
  Eigen::Matrix2d inv;
  double log_norm = 0.0;

  explicit Gauss2(const Eigen::Matrix2d& cov) {
    const double det = cov.determinant();
    if (!(det > 0.0)) throw std::runtime_error("covariance is not positive definite");
    inv = cov.inverse();
    log_norm = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det);
  }
  double logpdf(const Eigen::Vector2d& d) const { return log_norm - 0.5 * d.dot(inv * d); }
};

Eigen::MatrixXd exp_corr(const Eigen::MatrixXd& dist, double phi) { return (-phi * dist.array()).exp().matrix(); }

// Cholesky of an exponential correlation matrix with a small diagonal jitter.
Eigen::LLT<Eigen::MatrixXd> corr_llt(const Eigen::MatrixXd& dist, double phi) {
  Eigen::MatrixXd r = exp_corr(dist, phi);
  r.diagonal().array() += 1e-8;
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success) throw std::runtime_error("GP correlation matrix is not positive definite");
  return llt;
}

double llt_logdet(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

class JointSampler {
 public:
  JointSampler(const Dataset& data, const JointSpec& spec, const McmcConfig& cfg)
      : data_(data),
        spec_(spec),
        cfg_(cfg),
        rng_(cfg.seed),
        n_(data.size()),
        jls_(spec.mode == JointMode::Jls),
        tau2_walks_{ReflectedWalk("tau2_1", scale_or(cfg, "tau2_1", 0.5), -20.0, 20.0),
                    ReflectedWalk("tau2_2", scale_or(cfg, "tau2_2", 0.5), -20.0, 20.0)},
        phi_walks_{ReflectedWalk("phi_1", scale_or(cfg, "phi_1", 2.0), spec.phi_lo, spec.phi_hi),
                   ReflectedWalk("phi_2", scale_or(cfg, "phi_2", 2.0), spec.phi_lo, spec.phi_hi)},
        gamma_walk_("gamma", scale_or(cfg, "gamma", 0.1), 0.0, 1.0) {
    const auto n = static_cast<Eigen::Index>(n_);
    latent_ = Eigen::MatrixXd::Zero(n, 2);
    field_ = Eigen::MatrixXd::Zero(n, 2);
    sigma_ = Eigen::Matrix2d::Identity();
    t_ = Eigen::Matrix2d::Identity();
    mu0_ = Eigen::Vector2d::Zero();
    if (jls_) {
      tau2_ = Eigen::Vector2d::Constant(spec.fixed_tau2.value_or(1.0));
      phi_ = Eigen::Vector2d::Constant(0.5 * (spec.phi_lo + spec.phi_hi));
      gamma_ = spec.fixed_gamma.value_or(0.5);
      for (int j = 0; j < 2; ++j) corr_[j] = corr_llt(data.loc.distances(), phi_(j));
    }
    std::vector<int> start(n_, 0);
    if (cfg.init == InitKind::KMeans) start = kmeans_labels(data.loc, cfg.init_clusters, rng_);
    init_clusters(start);
  }

  JointSamples run() {
    JointSamples out;
    out.loglik.resize(cfg_.num_kept(), static_cast<Eigen::Index>(n_));
    for (int iter = 0; iter < cfg_.n_iter; ++iter) {
      update_allocations();
      update_cluster_means();
      update_mu0();
      update_t();
      update_sigma();
      if (jls_) {
        update_latent();
        update_tau2(iter);
        update_phi(iter);
        update_gamma(iter);
      }
      if (cfg_.keep(iter)) record(out);
    }
    if (jls_) {
      for (const auto& w : tau2_walks_) out.acceptance[w.name()] = w.stat();
      for (const auto& w : phi_walks_) out.acceptance[w.name()] = w.stat();
      if (!spec_.fixed_gamma) out.acceptance[gamma_walk_.name()] = gamma_walk_.stat();
    }
    return out;
  }

 private:
  void init_clusters(const std::vector<int>& start) {
    const CohesionConfig& coh = spec_.cohesion;
    labels_.assign(n_, -1);
    for (std::size_t i = 0; i < n_; ++i) {
      int placed = -1;
      for (std::size_t h = 0; h < clusters_.size() && placed < 0; ++h) {
        if (start[static_cast<std::size_t>(clusters_[h].idx.front())] != start[i]) continue;
        if (coh.kind == CohesionKind::HardBoundary &&
            !std::isfinite(log_cohesion_ratio(clusters_[h].geo, data_.loc[i], coh)))
          continue;
        placed = static_cast<int>(h);
      }
      if (placed < 0) {
        placed = static_cast<int>(clusters_.size());
        clusters_.emplace_back();
        clusters_.back().mu = mu0_;
      }
      Cluster& c = clusters_[static_cast<std::size_t>(placed)];
      c.geo.add(data_.loc[i], log_cohesion_ratio(c.geo, data_.loc[i], coh));
      c.idx.push_back(static_cast<int>(i));
      labels_[i] = placed;
    }
  }

  Eigen::Vector2d residual(std::size_t i) const {
    return data_.y.row(static_cast<Eigen::Index>(i)).transpose() - field_.row(static_cast<Eigen::Index>(i)).transpose();
  }

  void remove_cluster(std::size_t h) {
    if (h + 1 != clusters_.size()) {
      clusters_[h] = std::move(clusters_.back());
      for (int i : clusters_[h].idx) labels_[static_cast<std::size_t>(i)] = static_cast<int>(h);
    }
    clusters_.pop_back();
  }

  void update_allocations() {
    const int m = cfg_.neal_m;
    const Gauss2 lik(sigma_);
    Eigen::LLT<Eigen::Matrix2d> t_llt(t_);
    std::vector<Eigen::Vector2d> aux(static_cast<std::size_t>(m));
    std::vector<double> logw, ratio;
    const ClusterGeometry empty;
    for (std::size_t i = 0; i < n_; ++i) {
      const Point p = data_.loc[i];
      const Eigen::Vector2d r = residual(i);
      const auto h0 = static_cast<std::size_t>(labels_[i]);
      Cluster& own = clusters_[h0];
      bool reuse = false;
      if (own.idx.size() == 1) {
        aux[0] = own.mu;
        reuse = true;
        remove_cluster(h0);
      } else {
        const auto pos = static_cast<std::size_t>(std::find(own.idx.begin(), own.idx.end(), static_cast<int>(i)) - own.idx.begin());
        own.idx[pos] = own.idx.back();
        own.idx.pop_back();
        own.geo.remove_at(pos, spec_.cohesion);
      }
      for (int j = reuse ? 1 : 0; j < m; ++j)
        aux[static_cast<std::size_t>(j)] = mu0_ + t_llt.matrixL() * Eigen::Vector2d(std_normal(rng_), std_normal(rng_));

      const std::size_t k = clusters_.size();
      logw.resize(k + static_cast<std::size_t>(m));
      ratio.resize(k);
      for (std::size_t h = 0; h < k; ++h) {
        ratio[h] = log_cohesion_ratio(clusters_[h].geo, p, spec_.cohesion);
        logw[h] = ratio[h] + (spec_.prior_only ? 0.0 : lik.logpdf(r - clusters_[h].mu));
      }
      const double log_new = log_cohesion_ratio(empty, p, spec_.cohesion);
      for (int j = 0; j < m; ++j)
        logw[k + static_cast<std::size_t>(j)] = log_new - std::log(static_cast<double>(m)) +
                                                 (spec_.prior_only ? 0.0 : lik.logpdf(r - aux[static_cast<std::size_t>(j)]));

      const std::size_t pick = sample_log_weights(logw, rng_);
      if (pick >= k) {
        Cluster c;
        c.mu = aux[pick - k];
        c.idx.push_back(static_cast<int>(i));
        c.geo.add(p, log_new);
        clusters_.push_back(std::move(c));
        labels_[i] = static_cast<int>(k);
      } else {
        clusters_[pick].geo.add(p, ratio[pick]);
        clusters_[pick].idx.push_back(static_cast<int>(i));
        labels_[i] = static_cast<int>(pick);
      }
    }
  }

  void update_cluster_means() {
    const Eigen::Matrix2d sigma_inv = sigma_.inverse();
    const Eigen::Matrix2d t_inv = t_.inverse();
    for (auto& c : clusters_) {
      Eigen::Matrix2d prec = t_inv;
      Eigen::Vector2d lin = t_inv * mu0_;
      if (!spec_.prior_only) {
        Eigen::Vector2d sum = Eigen::Vector2d::Zero();
        for (int i : c.idx) sum += residual(static_cast<std::size_t>(i));
        prec += static_cast<double>(c.idx.size()) * sigma_inv;
        lin += sigma_inv * sum;
      }
      c.mu = sample_mvn_canonical(prec, lin, rng_);
    }
  }

  void update_mu0() {
    const Eigen::Matrix2d t_inv = t_.inverse();
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (const auto& c : clusters_) sum += c.mu;
    const Eigen::Matrix2d prec =
        static_cast<double>(clusters_.size()) * t_inv + Eigen::Matrix2d::Identity() / (spec_.mu0_sd * spec_.mu0_sd);
    mu0_ = sample_mvn_canonical(prec, t_inv * sum, rng_);
  }

  void update_t() {
    Eigen::Matrix2d scale = spec_.t_scale;
    for (const auto& c : clusters_) scale += (c.mu - mu0_) * (c.mu - mu0_).transpose();
    t_ = sample_inv_wishart(spec_.t_df + static_cast<double>(clusters_.size()), scale, rng_);
  }

  void update_sigma() {
    if (spec_.prior_only) {
      sigma_ = sample_inv_wishart(spec_.sigma_df, spec_.sigma_scale, rng_);
      return;
    }
    Eigen::Matrix2d scale = spec_.sigma_scale;
    for (std::size_t i = 0; i < n_; ++i) {
      const Eigen::Vector2d e = residual(i) - clusters_[static_cast<std::size_t>(labels_[i])].mu;
      scale += e * e.transpose();
    }
    if (!scale.allFinite()) throw std::runtime_error("fit_joint: non-finite residual scatter");
    sigma_ = sample_inv_wishart(spec_.sigma_df + static_cast<double>(n_), scale, rng_);
  }

  Eigen::MatrixXd cluster_residuals() const {
    Eigen::MatrixXd r(static_cast<Eigen::Index>(n_), 2);
    for (std::size_t i = 0; i < n_; ++i)
      r.row(static_cast<Eigen::Index>(i)) =
          data_.y.row(static_cast<Eigen::Index>(i)) - clusters_[static_cast<std::size_t>(labels_[i])].mu.transpose();
    return r;
  }

  void update_latent() {
    const auto n = static_cast<Eigen::Index>(n_);
    const Eigen::Matrix2d a = coregion(gamma_);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < 2; ++j) {
      const Eigen::MatrixXd rinv = corr_[j].solve(Eigen::MatrixXd::Identity(n, n));
      q.block(j * n, j * n, n, n) = rinv / tau2_(j);
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * n);
    if (!spec_.prior_only) {
      const Eigen::Matrix2d sigma_inv = sigma_.inverse();
      const Eigen::Matrix2d prec = a.transpose() * sigma_inv * a;
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) q.block(j * n, l * n, n, n).diagonal().array() += prec(j, l);
      const Eigen::MatrixXd lin = cluster_residuals() * sigma_inv * a;
      b << lin.col(0), lin.col(1);
    }
    const Eigen::VectorXd z = sample_mvn_canonical(q, b, rng_);
    latent_.col(0) = z.head(n);
    latent_.col(1) = z.tail(n);
    field_ = latent_ * a.transpose();
  }

  // log N(latent_j | 0, tau2 R_j) up to a constant, given R_j's factor.
  double latent_logpdf(int j, double tau2, const Eigen::LLT<Eigen::MatrixXd>& llt) const {
    const Eigen::VectorXd z = llt.matrixL().solve(latent_.col(j));
    const double n = static_cast<double>(n_);
    return -0.5 * n * std::log(tau2) - 0.5 * llt_logdet(llt) - 0.5 * z.squaredNorm() / tau2;
  }

  void update_tau2(int iter) {
    if (spec_.fixed_tau2) return;
    for (int j = 0; j < 2; ++j) {
      const double cur = std::log(tau2_(j));
      const double prop = tau2_walks_[j].propose(cur, rng_);
      auto target = [&](double u) {
        const double t2 = std::exp(u);
        return (spec_.tau2_shape - 1.0) * u - spec_.tau2_rate * t2 + u + latent_logpdf(j, t2, corr_[j]);
      };
      const bool accept = std::log(uniform01(rng_)) < target(prop) - target(cur);
      if (accept) tau2_(j) = std::exp(prop);
      tau2_walks_[j].record(accept, iter, cfg_);
    }
  }

  void update_phi(int iter) {
    for (int j = 0; j < 2; ++j) {
      const double prop = phi_walks_[j].propose(phi_(j), rng_);
      auto llt = corr_llt(data_.loc.distances(), prop);
      const double log_ratio = latent_logpdf(j, tau2_(j), llt) - latent_logpdf(j, tau2_(j), corr_[j]);
      const bool accept = std::log(uniform01(rng_)) < log_ratio;
      if (accept) {
        phi_(j) = prop;
        corr_[j] = std::move(llt);
      }
      phi_walks_[j].record(accept, iter, cfg_);
    }
  }

  double gamma_target(double g, const Eigen::MatrixXd& r, const Gauss2& lik) const {
    if (spec_.prior_only) return 0.0;
    const Eigen::Matrix2d a = coregion(g);
    double lp = 0.0;
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      lp += lik.logpdf(r.row(i).transpose() - a * latent_.row(i).transpose());
    return lp;
  }

  void update_gamma(int iter) {
    if (spec_.fixed_gamma) return;
    const Eigen::MatrixXd r = cluster_residuals();
    const Gauss2 lik(sigma_);
    const double prop = gamma_walk_.propose(gamma_, rng_);
    const bool accept = std::log(uniform01(rng_)) < gamma_target(prop, r, lik) - gamma_target(gamma_, r, lik);
    if (accept) {
      gamma_ = prop;
      field_ = latent_ * coregion(gamma_).transpose();
    }
    gamma_walk_.record(accept, iter, cfg_);
  }

  void record(JointSamples& out) {
    Partition part(labels_);
    JointDraw d;
    d.mu_star.assign(static_cast<std::size_t>(part.num_clusters()), Eigen::Vector2d::Zero());
    for (const auto& c : clusters_) d.mu_star[static_cast<std::size_t>(part.label(static_cast<std::size_t>(c.idx.front())))] = c.mu;
    d.mu0 = mu0_;
    d.sigma = sigma_;
    d.t = t_;
    if (jls_) {
      d.tau2 = tau2_;
      d.phi = phi_;
      d.gamma = gamma_;
      d.latent = latent_;
    }
    out.loglik.row(static_cast<Eigen::Index>(out.partitions.size())) = joint_loglik(data_, part, d).transpose();
    out.partitions.push_back(std::move(part));
    out.params.push_back(std::move(d));
  }

  const Dataset& data_;
  const JointSpec& spec_;
  const McmcConfig& cfg_;
  Rng rng_;
  std::size_t n_;
  bool jls_;
  ReflectedWalk tau2_walks_[2];
  ReflectedWalk phi_walks_[2];
  ReflectedWalk gamma_walk_;
  std::vector<int> labels_;
  std::vector<Cluster> clusters_;
  Eigen::Vector2d mu0_;
  Eigen::Matrix2d sigma_;
  Eigen::Matrix2d t_;
  Eigen::Vector2d tau2_ = Eigen::Vector2d::Ones();
  Eigen::Vector2d phi_ = Eigen::Vector2d::Ones();
  double gamma_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> corr_[2];
  Eigen::MatrixXd latent_;
  Eigen::MatrixXd field_;
};

}  // namespace

void JointSpec::validate() const {
  cohesion.validate();
  if (!(mu0_sd > 0.0)) throw std::invalid_argument("mu0_sd must be positive");
  if (!(sigma_df > 1.0) || !(t_df > 1.0)) throw std::invalid_argument("inverse-Wishart degrees of freedom must exceed 1");
  if (sigma_scale.llt().info() != Eigen::Success || t_scale.llt().info() != Eigen::Success)
    throw std::invalid_argument("inverse-Wishart scales must be positive definite");
  if (!(tau2_shape > 0.0) || !(tau2_rate > 0.0)) throw std::invalid_argument("tau2 prior parameters must be positive");
  if (!(phi_lo > 0.0) || !(phi_hi > phi_lo)) throw std::invalid_argument("phi support must satisfy 0 < lo < hi");
  if (fixed_gamma && !(*fixed_gamma >= 0.0 && *fixed_gamma < 1.0)) throw std::invalid_argument("fixed gamma must lie in [0, 1)");
  if (fixed_tau2 && !(*fixed_tau2 > 0.0)) throw std::invalid_argument("fixed tau2 must be positive");
}

Eigen::MatrixXd JointDraw::field(Eigen::Index n) const {
  if (latent.size() == 0) return Eigen::MatrixXd::Zero(n, 2);
  return latent * coregion(gamma).transpose();
}

Eigen::VectorXd joint_loglik(const Dataset& data, const Partition& partition, const JointDraw& draw) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const Gauss2 lik(draw.sigma);
  const Eigen::MatrixXd field = draw.field(n);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d mean = draw.mu_star[static_cast<std::size_t>(partition.label(static_cast<std::size_t>(i)))] +
                                 field.row(i).transpose();
    out(i) = lik.logpdf(data.y.row(i).transpose() - mean);
  }
  return out;
}

JointSamples fit_joint(const Dataset& data, const JointSpec& spec, const McmcConfig& cfg) {
  data.validate();
  spec.validate();
  cfg.validate();
  if (data.y.cols() != 2) throw std::invalid_argument("fit_joint needs a two-column response");
  JointSampler sampler(data, spec, cfg);
  return sampler.run();
}

std::pair<double, double> conditional_y1(const Eigen::Vector2d& mean, const Eigen::Matrix2d& sigma, double y2) {
  const double s1 = std::sqrt(sigma(0, 0));
  const double s2 = std::sqrt(sigma(1, 1));
  const double eta = sigma(0, 1) / (s1 * s2);
  const double slope = eta * s1 / s2;
  return {mean(0) - slope * mean(1) + slope * y2, sigma(0, 0) * (1.0 - eta * eta)};
}

PredictionSummary predict_joint(const Dataset& train, const JointSpec& spec, const JointSamples& samples,
                                std::span<const Point> new_sites, std::optional<Eigen::VectorXd> observed_y2,
                                Rng& rng) {
  if (samples.num_draws() == 0) throw std::invalid_argument("predict_joint: no posterior draws");
  const std::size_t m = new_sites.size();
  if (observed_y2 && static_cast<std::size_t>(observed_y2->size()) != m)
    throw std::invalid_argument("predict_joint: one observed y2 value per new site is required");
  const std::size_t T = samples.num_draws();
  const auto n = static_cast<Eigen::Index>(train.size());
  const bool jls = spec.mode == JointMode::Jls;

  // Cross distances between new and training sites.
  Eigen::MatrixXd cross(static_cast<Eigen::Index>(m), n);
  for (std::size_t s = 0; s < m; ++s)
    for (Eigen::Index i = 0; i < n; ++i) cross(static_cast<Eigen::Index>(s), i) = distance(new_sites[s], train.loc[static_cast<std::size_t>(i)]);

  PredictionSummary out;
  out.mean.assign(m, 0.0);
  out.lo90.resize(m);
  out.hi90.resize(m);
  std::vector<std::vector<double>> draws(m, std::vector<double>(T));
  Eigen::MatrixXd theta0 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), 2);
  for (std::size_t t = 0; t < T; ++t) {
    const JointDraw& d = samples.params[t];
    if (jls) {
      Eigen::MatrixXd latent0(static_cast<Eigen::Index>(m), 2);
      for (int j = 0; j < 2; ++j) {
        const auto llt = corr_llt(train.loc.distances(), d.phi(j));
        const Eigen::MatrixXd c = exp_corr(cross, d.phi(j));  // m x n correlations
        const Eigen::MatrixXd w = llt.solve(c.transpose());   // n x m
        const Eigen::VectorXd mean = w.transpose() * d.latent.col(j);
        for (std::size_t s = 0; s < m; ++s) {
          const auto si = static_cast<Eigen::Index>(s);
          const double var = std::max(0.0, d.tau2(j) * (1.0 - c.row(si).dot(w.col(si))));
          latent0(si, j) = mean(si) + std::sqrt(var) * std_normal(rng);
        }
      }
      theta0 = latent0 * coregion(d.gamma).transpose();
    }
    Eigen::LLT<Eigen::Matrix2d> t_llt(d.t);
    Eigen::LLT<Eigen::Matrix2d> s_llt(d.sigma);
    for (std::size_t s = 0; s < m; ++s) {
      const auto logw = new_site_log_weights(train, samples.partitions[t], new_sites[s], spec.cohesion);
      const std::size_t pick = sample_log_weights(logw, rng);
      const Eigen::Vector2d mu = pick < d.mu_star.size()
                                     ? d.mu_star[pick]
                                     : Eigen::Vector2d(d.mu0 + t_llt.matrixL() * Eigen::Vector2d(std_normal(rng), std_normal(rng)));
      const Eigen::Vector2d mean = mu + theta0.row(static_cast<Eigen::Index>(s)).transpose();
      double y1 = 0.0;
      double cond_mean = mean(0);
      if (observed_y2) {
        const auto [cm, cv] = conditional_y1(mean, d.sigma, (*observed_y2)(static_cast<Eigen::Index>(s)));
        cond_mean = cm;
        y1 = cm + std::sqrt(std::max(cv, 0.0)) * std_normal(rng);
      } else {
        const Eigen::Vector2d y = mean + s_llt.matrixL() * Eigen::Vector2d(std_normal(rng), std_normal(rng));
        y1 = y(0);
      }
      out.mean[s] += cond_mean / static_cast<double>(T);
      draws[s][t] = y1;
    }
  }
  for (std::size_t s = 0; s < m; ++s) {
    out.lo90[s] = quantile_inplace(draws[s], 0.05);
    out.hi90[s] = quantile_inplace(draws[s], 0.95);
  }
  return out;
}

Eigen::MatrixXd joint_fitted(const Dataset& data, const JointSamples& samples) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd fitted = Eigen::MatrixXd::Zero(n, 2);
  for (std::size_t t = 0; t < samples.num_draws(); ++t) {
    const auto& d = samples.params[t];
    const Eigen::MatrixXd field = d.field(n);
    for (Eigen::Index i = 0; i < n; ++i)
      fitted.row(i) += d.mu_star[static_cast<std::size_t>(samples.partitions[t].label(static_cast<std::size_t>(i)))].transpose() +
                       field.row(i);
  }
  return fitted / static_cast<double>(samples.num_draws());
}

}  // namespace sppm
