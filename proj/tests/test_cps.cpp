#include <cmath>

#include "doctest.h"
#include "sppm/cps.hpp"
#include "sppm/datagen.hpp"
#include "sppm/metrics.hpp"
#include "sppm/prior.hpp"
#include "support.hpp"

using namespace sppm;

namespace {

Dataset line_data(std::size_t n, double intercept, double slope, double noise, std::uint64_t seed) {
  Rng rng(seed);
  const auto pts = test::random_points(n, rng);
  Dataset d{LocationSet::standardize(pts), Eigen::MatrixXd(n, 1), Eigen::MatrixXd(n, 1)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    d.x(r, 0) = 2.0 * std_normal(rng);
    d.y(r, 0) = intercept + slope * d.x(r, 0) + noise * std_normal(rng);
  }
  return d;
}

McmcConfig run(int iters, int burnin, std::uint64_t seed) {
  McmcConfig c;
  c.n_iter = iters;
  c.burnin = burnin;
  c.seed = seed;
  return c;
}

bool canonical(const Partition& p) {
  int next = 0;
  for (int l : p.labels()) {
    if (l > next) return false;
    if (l == next) ++next;
  }
  for (int h = 0; h < p.num_clusters(); ++h)
    for (int i : p.members(h))
      if (p.label(static_cast<std::size_t>(i)) != h) return false;
  return next == p.num_clusters();
}

}  // namespace

TEST_CASE("fixed seed reproduces the chain") {
  const Dataset d = line_data(30, 1.0, 0.5, 0.5, 4);
  CpsSpec spec;
  spec.cohesion.kind = CohesionKind::PriorPredictive;
  const auto a = fit_cps(d, spec, run(200, 100, 9));
  const auto b = fit_cps(d, spec, run(200, 100, 9));
  REQUIRE(a.num_draws() == b.num_draws());
  CHECK(a.partitions == b.partitions);
  CHECK(a.loglik == b.loglik);
  for (std::size_t t = 0; t < a.num_draws(); ++t) CHECK(a.params[t].sigma == b.params[t].sigma);
  const auto c = fit_cps(d, spec, run(200, 100, 10));
  CHECK(c.loglik != a.loglik);
}

TEST_CASE("single cluster posterior matches the regression oracle") {
  // With M tiny the chain never leaves the one-cluster partition, and under
  // diffuse priors the posterior of (mu*, beta) centres on least squares.
  const std::size_t n = 60;
  const Dataset d = line_data(n, 2.0, 0.5, 0.3, 5);
  CpsSpec spec;
  spec.cohesion.kind = CohesionKind::DistancePenalty;
  spec.cohesion.M = 1e-12;
  const auto s = fit_cps(d, spec, run(4000, 1000, 3));
  for (const auto& p : s.partitions) REQUIRE(p.num_clusters() == 1);

  Eigen::MatrixXd design(n, 2);
  design.col(0).setOnes();
  design.col(1) = d.x.col(0);
  const Eigen::Vector2d ols = (design.transpose() * design).ldlt().solve(design.transpose() * d.y.col(0));
  const double s2 = (d.y.col(0) - design * ols).squaredNorm() / static_cast<double>(n - 2);
  const Eigen::Matrix2d cov = s2 * (design.transpose() * design).inverse();

  std::vector<double> mu, beta;
  for (const auto& p : s.params) {
    mu.push_back(p.mu_star[0]);
    beta.push_back(p.beta(0));
  }
  CHECK(std::abs(test::mean_of(mu) - ols(0)) < 3.0 * std::sqrt(cov(0, 0)));
  CHECK(std::abs(test::mean_of(beta) - ols(1)) < 3.0 * std::sqrt(cov(1, 1)));
}

TEST_CASE("likelihood-free run reproduces the prior") {
  const LocationSet loc = LocationSet::standardize(test::grid_points(3, 2));
  Dataset d{loc, Eigen::MatrixXd::Zero(6, 1), Eigen::MatrixXd()};
  for (CohesionKind kind : {CohesionKind::DistancePenalty, CohesionKind::HardBoundary, CohesionKind::PriorPredictive,
                            CohesionKind::DoubleDip}) {
    CAPTURE(cohesion_name(kind));
    CpsSpec spec;
    spec.cohesion.kind = kind;
    spec.cohesion.a = loc.median_pairwise_distance();
    spec.prior_only = true;
    const auto prior = exact_prior(loc, spec.cohesion);
    double ek = 0.0, es = 0.0, em = 0.0;
    for (const auto& [p, w] : prior) {
      ek += w * p.num_clusters();
      es += w * p.num_singletons();
      em += w * p.max_cluster_size();
    }
    const auto s = fit_cps(d, spec, run(40000, 2000, 21));
    std::vector<double> k, singles, biggest, mu0, sigma;
    for (std::size_t t = 0; t < s.num_draws(); ++t) {
      k.push_back(s.partitions[t].num_clusters());
      singles.push_back(s.partitions[t].num_singletons());
      biggest.push_back(s.partitions[t].max_cluster_size());
      mu0.push_back(s.params[t].mu0);
      sigma.push_back(s.params[t].sigma);
    }
    CHECK(std::abs(test::mean_of(k) - ek) < 5.0 * test::batch_means_se(k));
    CHECK(std::abs(test::mean_of(singles) - es) < 5.0 * test::batch_means_se(singles));
    CHECK(std::abs(test::mean_of(biggest) - em) < 5.0 * test::batch_means_se(biggest));
    CHECK(std::abs(test::mean_of(mu0)) < 5.0 * test::batch_means_se(mu0));
    CHECK(std::abs(test::mean_of(sigma) - 5.0) < 5.0 * test::batch_means_se(sigma));
  }
}

TEST_CASE("recorded draws are internally consistent") {
  SimScenario sc;
  sc.n_train = 60;
  sc.n_test = 10;
  sc.seed = 8;
  const SimData sim = gen_dataset(sc);
  const PreparedData prep = prepare_training(sim.train.coords, sim.train.y, sim.train.x, false);
  CpsSpec spec;
  spec.cohesion.kind = CohesionKind::DoubleDip;
  spec.cohesion.M = 0.1;
  const auto s = fit_cps(prep.data, spec, run(1500, 700, 2));

  for (std::size_t t = 0; t < s.num_draws(); ++t) {
    const Partition& p = s.partitions[t];
    const CpsDraw& draw = s.params[t];
    REQUIRE(p.size() == prep.data.size());
    CHECK(canonical(p));
    REQUIRE(draw.mu_star.size() == static_cast<std::size_t>(p.num_clusters()));
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const double mean = draw.mu_star[static_cast<std::size_t>(p.label(i))] + prep.data.x.row(r).dot(draw.beta);
      const double z = (prep.data.y(r, 0) - mean) / draw.sigma;
      const double direct = -0.5 * std::log(2.0 * M_PI) - std::log(draw.sigma) - 0.5 * z * z;
      CHECK(std::abs(s.loglik(static_cast<Eigen::Index>(t), r) - direct) < 1e-10);
    }
  }
  REQUIRE(s.acceptance.size() == 2);
  for (const auto& [name, stat] : s.acceptance) {
    CAPTURE(name);
    CHECK(stat.proposed == static_cast<long>(1500 - 700));
    CHECK(stat.rate() >= 0.1);
    CHECK(stat.rate() <= 0.7);
  }
}

TEST_CASE("new-site allocation weights are cohesion ratios") {
  const std::vector<Point> pts{{0, 0}, {0.1, 0}, {0, 0.1}, {3, 3}, {3.1, 3}};
  const LocationSet loc = LocationSet::from_coordinates(pts);
  Dataset d{loc, Eigen::MatrixXd::Zero(5, 1), Eigen::MatrixXd()};
  const Partition p(std::vector<int>{0, 0, 0, 1, 1});
  CohesionConfig cfg;
  cfg.kind = CohesionKind::HardBoundary;
  cfg.a = 1.0;
  cfg.M = 0.5;
  const Point site{0.05, 0.05};
  const auto w = new_site_log_weights(d, p, site, cfg);
  REQUIRE(w.size() == 3);
  // Joining the near cluster: Gamma(4)/Gamma(3) = 3; the far cluster is beyond a.
  CHECK(w[0] == doctest::Approx(std::log(3.0)));
  CHECK(std::isinf(w[1]));
  CHECK(w[2] == doctest::Approx(std::log(0.5)));

  cfg.kind = CohesionKind::DoubleDip;
  const auto w4 = new_site_log_weights(d, p, site, cfg);
  const std::vector<Point> near{pts[0], pts[1], pts[2]};
  std::vector<Point> joined = near;
  joined.push_back(site);
  CHECK(w4[0] == doctest::Approx(log_cohesion(joined, cfg) - log_cohesion(near, cfg)).epsilon(1e-12));
  CHECK(w4[2] == doctest::Approx(log_cohesion(std::vector<Point>{site}, cfg)).epsilon(1e-12));
}

TEST_CASE("prediction under a single-cluster posterior") {
  const Dataset d = line_data(40, -1.0, 0.8, 0.3, 6);
  CpsSpec spec;
  spec.cohesion.M = 1e-12;
  const auto s = fit_cps(d, spec, run(1500, 500, 4));
  const std::vector<Point> sites{{0.1, 0.2}, {-0.5, 0.3}};
  Eigen::MatrixXd new_x(2, 1);
  new_x << 1.5, -2.0;
  Rng rng(5);
  const auto pred = predict_cps(d, spec, s, sites, new_x, rng);
  for (std::size_t j = 0; j < sites.size(); ++j) {
    double expected = 0.0;
    for (const auto& p : s.params) expected += p.mu_star[0] + new_x(static_cast<Eigen::Index>(j), 0) * p.beta(0);
    expected /= static_cast<double>(s.num_draws());
    CHECK(pred.mean[j] == doctest::Approx(expected).epsilon(1e-6));
    CHECK(pred.lo90[j] < pred.mean[j]);
    CHECK(pred.hi90[j] > pred.mean[j]);
  }
}

TEST_CASE("prediction beats the intercept-only baseline on clustered data") {
  SimScenario sc;
  sc.n_train = 100;
  sc.n_test = 100;
  sc.layout = Layout::Mixture;
  sc.seed = 12;
  const SimData sim = gen_dataset(sc);
  const PreparedData prep = prepare_training(sim.train.coords, sim.train.y, sim.train.x, false);
  CpsSpec spec;
  spec.cohesion.kind = CohesionKind::DoubleDip;
  spec.cohesion.M = 0.01;
  const auto s = fit_cps(prep.data, spec, run(1500, 700, 7));
  std::vector<Point> sites;
  for (const Point& p : sim.test.coords) sites.push_back(prep.data.loc.to_working(p));
  Rng rng(1);
  const auto pred = predict_cps(prep.data, spec, s, sites, sim.test.x, rng);
  const std::span<const double> truth(sim.test.y.data(), static_cast<std::size_t>(sim.test.y.size()));
  const std::vector<double> baseline(truth.size(), sim.train.y.mean());
  CHECK(mspe(truth, pred.mean) < mspe(truth, baseline));
}

TEST_CASE("invalid input is rejected") {
  Dataset d = line_data(10, 0.0, 1.0, 1.0, 1);
  CpsSpec spec;
  d.y = Eigen::MatrixXd::Zero(10, 2);
  CHECK_THROWS_AS(fit_cps(d, spec, run(10, 5, 1)), std::invalid_argument);
  d = line_data(10, 0.0, 1.0, 1.0, 1);
  spec.sigma_max = -1.0;
  CHECK_THROWS_AS(fit_cps(d, spec, run(10, 5, 1)), std::invalid_argument);
  spec = CpsSpec{};
  CHECK_THROWS_AS(fit_cps(d, spec, run(10, 10, 1)), std::invalid_argument);
}
