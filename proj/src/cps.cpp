#include "sppm/cps.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sppm/kernels.hpp"

namespace sppm {

namespace {

struct Cluster {
  std::vector<int> idx;
  ClusterGeometry geo;
  double mu = 0.0;
};

double scale_or(const McmcConfig& cfg, const std::string& name, double fallback) {
  const auto it = cfg.rw_scales.find(name);
  return it == cfg.rw_scales.end() ? fallback : it->second;
}

// Labels in which every cluster has positive prior mass: one cluster when
// feasible, otherwise (C2 only) a greedy first-fit allocation.
std::vector<int> feasible_labels(const LocationSet& loc, const CohesionConfig& coh, std::vector<int> start) {
  if (coh.kind != CohesionKind::HardBoundary) return start;
  const std::size_t n = loc.size();
  std::vector<int> labels(n, -1);
  std::vector<std::vector<int>> groups;
  std::vector<int> group_of_start;
  for (std::size_t i = 0; i < n; ++i) {
    int placed = -1;
    for (std::size_t g = 0; g < groups.size() && placed < 0; ++g) {
      if (group_of_start[g] != start[i]) continue;
      bool ok = true;
      for (int j : groups[g])
        if (loc.distance(i, static_cast<std::size_t>(j)) > coh.a) {
          ok = false;
          break;
        }
      if (ok) placed = static_cast<int>(g);
    }
    if (placed < 0) {
      placed = static_cast<int>(groups.size());
      groups.emplace_back();
      group_of_start.push_back(start[i]);
    }
    groups[static_cast<std::size_t>(placed)].push_back(static_cast<int>(i));
    labels[i] = placed;
  }
  return labels;
}

class CpsSampler {
 public:
  CpsSampler(const Dataset& data, const CpsSpec& spec, const McmcConfig& cfg)
      : data_(data),
        spec_(spec),
        cfg_(cfg),
        rng_(cfg.seed),
        n_(data.size()),
        p_(data.x.cols()),
        y_(data.y.col(0)),
        sigma_walk_("sigma", scale_or(cfg, "sigma", 0.5), 0.0, spec.sigma_max),
        sigma0_walk_("sigma0", scale_or(cfg, "sigma0", 0.5), 0.0, spec.sigma0_max) {
    beta_ = Eigen::VectorXd::Zero(p_);
    xbeta_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
    sigma_ = 0.5 * spec.sigma_max;
    sigma0_ = 0.5 * spec.sigma0_max;
    mu0_ = 0.0;
    std::vector<int> start(n_, 0);
    if (cfg.init == InitKind::KMeans) start = kmeans_labels(data.loc, cfg.init_clusters, rng_);
    labels_ = feasible_labels(data.loc, spec.cohesion, start);
    const int k = *std::max_element(labels_.begin(), labels_.end()) + 1;
    clusters_.resize(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n_; ++i) clusters_[static_cast<std::size_t>(labels_[i])].idx.push_back(static_cast<int>(i));
    for (auto& c : clusters_) {
      std::vector<Point> pts;
      for (int i : c.idx) pts.push_back(data.loc[static_cast<std::size_t>(i)]);
      c.geo = ClusterGeometry::build(pts, spec.cohesion);
      c.mu = mu0_;
    }
  }

  CpsSamples run() {
    CpsSamples out;
    out.loglik.resize(cfg_.num_kept(), static_cast<Eigen::Index>(n_));
    for (int iter = 0; iter < cfg_.n_iter; ++iter) {
      update_allocations();
      update_cluster_means();
      update_beta();
      update_mu0();
      update_sigma0(iter);
      update_sigma(iter);
      if (cfg_.keep(iter)) record(out);
    }
    out.acceptance[sigma_walk_.name()] = sigma_walk_.stat();
    out.acceptance[sigma0_walk_.name()] = sigma0_walk_.stat();
    return out;
  }

 private:
  double residual(std::size_t i) const { return y_(static_cast<Eigen::Index>(i)) - xbeta_(static_cast<Eigen::Index>(i)); }

  double loglik_term(double r, double mu) const {
    return spec_.prior_only ? 0.0 : log_normal_pdf(r, mu, sigma_ * sigma_);
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
    std::vector<double> aux(static_cast<std::size_t>(m));
    std::vector<double> logw, ratio;
    const ClusterGeometry empty;
    for (std::size_t i = 0; i < n_; ++i) {
      const Point p = data_.loc[i];
      const double r = residual(i);
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
      for (int j = reuse ? 1 : 0; j < m; ++j) aux[static_cast<std::size_t>(j)] = mu0_ + sigma0_ * std_normal(rng_);

      const std::size_t k = clusters_.size();
      logw.resize(k + static_cast<std::size_t>(m));
      ratio.resize(k);
      for (std::size_t h = 0; h < k; ++h) {
        ratio[h] = log_cohesion_ratio(clusters_[h].geo, p, spec_.cohesion);
        logw[h] = ratio[h] + loglik_term(r, clusters_[h].mu);
      }
      const double log_new = log_cohesion_ratio(empty, p, spec_.cohesion);
      for (int j = 0; j < m; ++j)
        logw[k + static_cast<std::size_t>(j)] = log_new - std::log(static_cast<double>(m)) + loglik_term(r, aux[static_cast<std::size_t>(j)]);

      const std::size_t pick = sample_log_weights(logw, rng_);
      if (pick >= k) {
        Cluster c;
        c.mu = aux[pick - k];
        c.idx.push_back(static_cast<int>(i));
        c.geo.add(p, log_new);
        clusters_.push_back(std::move(c));
        labels_[i] = static_cast<int>(k);
      } else {
        Cluster& c = clusters_[pick];
        c.geo.add(p, ratio[pick]);
        c.idx.push_back(static_cast<int>(i));
        labels_[i] = static_cast<int>(pick);
      }
    }
  }

  void update_cluster_means() {
    const double s2 = sigma_ * sigma_;
    const double s02 = sigma0_ * sigma0_;
    for (auto& c : clusters_) {
      double prec = 1.0 / s02;
      double lin = mu0_ / s02;
      if (!spec_.prior_only) {
        double sum = 0.0;
        for (int i : c.idx) sum += residual(static_cast<std::size_t>(i));
        prec += static_cast<double>(c.idx.size()) / s2;
        lin += sum / s2;
      }
      if (!std::isfinite(lin)) throw std::runtime_error("fit_cps: non-finite cluster sufficient statistic");
      c.mu = lin / prec + std_normal(rng_) / std::sqrt(prec);
    }
  }

  void update_beta() {
    if (p_ == 0) return;
    const double prior_prec = 1.0 / (spec_.beta_sd * spec_.beta_sd);
    Eigen::MatrixXd prec = prior_prec * Eigen::MatrixXd::Identity(p_, p_);
    Eigen::VectorXd lin = Eigen::VectorXd::Zero(p_);
    if (!spec_.prior_only) {
      const double s2 = sigma_ * sigma_;
      Eigen::VectorXd r(static_cast<Eigen::Index>(n_));
      for (std::size_t i = 0; i < n_; ++i)
        r(static_cast<Eigen::Index>(i)) = y_(static_cast<Eigen::Index>(i)) - clusters_[static_cast<std::size_t>(labels_[i])].mu;
      prec += data_.x.transpose() * data_.x / s2;
      lin += data_.x.transpose() * r / s2;
    }
    beta_ = sample_mvn_canonical(prec, lin, rng_);
    xbeta_ = data_.x * beta_;
  }

  void update_mu0() {
    const double s02 = sigma0_ * sigma0_;
    double sum = 0.0;
    for (const auto& c : clusters_) sum += c.mu;
    const double prec = static_cast<double>(clusters_.size()) / s02 + 1.0 / (spec_.mu0_sd * spec_.mu0_sd);
    mu0_ = (sum / s02) / prec + std_normal(rng_) / std::sqrt(prec);
  }

  double sigma0_target(double s0) const {
    double lp = 0.0;
    for (const auto& c : clusters_) lp += log_normal_pdf(c.mu, mu0_, s0 * s0);
    return lp;
  }

  void update_sigma0(int iter) {
    const double prop = sigma0_walk_.propose(sigma0_, rng_);
    const double log_ratio = sigma0_target(prop) - sigma0_target(sigma0_);
    const bool accept = std::log(uniform01(rng_)) < log_ratio;
    if (accept) sigma0_ = prop;
    sigma0_walk_.record(accept, iter, cfg_);
  }

  double sigma_target(double s) const {
    if (spec_.prior_only) return 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double d = residual(i) - clusters_[static_cast<std::size_t>(labels_[i])].mu;
      ss += d * d;
    }
    return -static_cast<double>(n_) * std::log(s) - 0.5 * ss / (s * s);
  }

  void update_sigma(int iter) {
    const double prop = sigma_walk_.propose(sigma_, rng_);
    const double log_ratio = sigma_target(prop) - sigma_target(sigma_);
    const bool accept = std::log(uniform01(rng_)) < log_ratio;
    if (accept) sigma_ = prop;
    sigma_walk_.record(accept, iter, cfg_);
  }

  void record(CpsSamples& out) {
    Partition part(labels_);
    CpsDraw d;
    d.mu_star.assign(static_cast<std::size_t>(part.num_clusters()), 0.0);
    for (const auto& c : clusters_) d.mu_star[static_cast<std::size_t>(part.label(static_cast<std::size_t>(c.idx.front())))] = c.mu;
    d.beta = beta_;
    d.sigma = sigma_;
    d.mu0 = mu0_;
    d.sigma0 = sigma0_;
    out.loglik.row(static_cast<Eigen::Index>(out.partitions.size())) = cps_loglik(data_, part, d).transpose();
    out.partitions.push_back(std::move(part));
    out.params.push_back(std::move(d));
  }

  const Dataset& data_;
  const CpsSpec& spec_;
  const McmcConfig& cfg_;
  Rng rng_;
  std::size_t n_;
  Eigen::Index p_;
  Eigen::VectorXd y_;
  ReflectedWalk sigma_walk_;
  ReflectedWalk sigma0_walk_;
  std::vector<int> labels_;
  std::vector<Cluster> clusters_;
  Eigen::VectorXd beta_;
  Eigen::VectorXd xbeta_;
  double sigma_ = 1.0;
  double sigma0_ = 1.0;
  double mu0_ = 0.0;
};

}  // namespace

void CpsSpec::validate() const {
  cohesion.validate();
  if (!(sigma_max > 0.0) || !(sigma0_max > 0.0) || !(beta_sd > 0.0) || !(mu0_sd > 0.0))
    throw std::invalid_argument("CPS prior bounds must be positive");
}

Eigen::VectorXd cps_loglik(const Dataset& data, const Partition& partition, const CpsDraw& draw) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::VectorXd mean(n);
  for (Eigen::Index i = 0; i < n; ++i) mean(i) = draw.mu_star[static_cast<std::size_t>(partition.label(static_cast<std::size_t>(i)))];
  if (data.x.cols() > 0) mean += data.x * draw.beta;
  const Eigen::VectorXd y = data.y.col(0);
  Eigen::VectorXd out(n);
  kernels::gaussian_logpdf(std::span<const double>(y.data(), static_cast<std::size_t>(n)),
                           std::span<const double>(mean.data(), static_cast<std::size_t>(n)), draw.sigma * draw.sigma,
                           std::span<double>(out.data(), static_cast<std::size_t>(n)));
  return out;
}

CpsSamples fit_cps(const Dataset& data, const CpsSpec& spec, const McmcConfig& cfg) {
  data.validate();
  spec.validate();
  cfg.validate();
  if (data.y.cols() != 1) throw std::invalid_argument("fit_cps needs a one-column response");
  CpsSampler sampler(data, spec, cfg);
  return sampler.run();
}

std::vector<double> new_site_log_weights(const Dataset& train, const Partition& partition, Point site,
                                         const CohesionConfig& cohesion) {
  std::vector<double> logw;
  logw.reserve(static_cast<std::size_t>(partition.num_clusters()) + 1);
  std::vector<Point> pts;
  for (const auto& members : partition.clusters()) {
    pts.clear();
    for (int i : members) pts.push_back(train.loc[static_cast<std::size_t>(i)]);
    logw.push_back(log_cohesion_ratio(pts, site, cohesion));
  }
  logw.push_back(log_cohesion_ratio(std::span<const Point>(), site, cohesion));
  return logw;
}

PredictionSummary predict_cps(const Dataset& train, const CpsSpec& spec, const CpsSamples& samples,
                              std::span<const Point> new_sites, const Eigen::MatrixXd& new_x, Rng& rng) {
  if (samples.num_draws() == 0) throw std::invalid_argument("predict_cps: no posterior draws");
  const Eigen::Index p = train.x.cols();
  if (p > 0 && (new_x.rows() != static_cast<Eigen::Index>(new_sites.size()) || new_x.cols() != p))
    throw std::invalid_argument("predict_cps: covariates for new sites do not match the training design");
  const std::size_t m = new_sites.size();
  const std::size_t T = samples.num_draws();
  PredictionSummary out;
  out.mean.assign(m, 0.0);
  out.lo90.resize(m);
  out.hi90.resize(m);
  std::vector<std::vector<double>> ydraws(m, std::vector<double>(T));
  for (std::size_t t = 0; t < T; ++t) {
    const CpsDraw& d = samples.params[t];
    const Partition& part = samples.partitions[t];
    for (std::size_t s = 0; s < m; ++s) {
      const double xb = p > 0 ? new_x.row(static_cast<Eigen::Index>(s)).dot(d.beta) : 0.0;
      auto logw = new_site_log_weights(train, part, new_sites[s], spec.cohesion);
      const auto w = [&] {
        const double mx = *std::max_element(logw.begin(), logw.end());
        std::vector<double> v(logw.size());
        double tot = 0.0;
        for (std::size_t h = 0; h < v.size(); ++h) tot += v[h] = std::exp(logw[h] - mx);
        for (double& x : v) x /= tot;
        return v;
      }();
      const std::size_t k = d.mu_star.size();
      double cond_mean = w[k] * d.mu0;
      for (std::size_t h = 0; h < k; ++h) cond_mean += w[h] * d.mu_star[h];
      out.mean[s] += (cond_mean + xb) / static_cast<double>(T);
      const std::size_t pick = sample_log_weights(logw, rng);
      const double mu = pick < k ? d.mu_star[pick] : d.mu0 + d.sigma0 * std_normal(rng);
      ydraws[s][t] = mu + xb + d.sigma * std_normal(rng);
    }
  }
  for (std::size_t s = 0; s < m; ++s) {
    out.lo90[s] = quantile_inplace(ydraws[s], 0.05);
    out.hi90[s] = quantile_inplace(ydraws[s], 0.95);
  }
  return out;
}

Eigen::VectorXd cps_fitted(const Dataset& data, const CpsSamples& samples) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(n);
  for (std::size_t t = 0; t < samples.num_draws(); ++t) {
    const auto& d = samples.params[t];
    for (Eigen::Index i = 0; i < n; ++i)
      fitted(i) += d.mu_star[static_cast<std::size_t>(samples.partitions[t].label(static_cast<std::size_t>(i)))];
    if (data.x.cols() > 0) fitted += data.x * d.beta;
  }
  return fitted / static_cast<double>(samples.num_draws());
}

}  // namespace sppm
