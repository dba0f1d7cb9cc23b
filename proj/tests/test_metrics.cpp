#include <cmath>
#include <vector>

#include "doctest.h"
#include "sppm/metrics.hpp"
#include "support.hpp"

using namespace sppm;

namespace {

Partition random_partition(std::size_t n, int max_k, Rng& rng) {
  std::uniform_int_distribution<int> u(0, max_k - 1);
  std::vector<int> labels(n);
  for (int& l : labels) l = u(rng);
  return Partition(labels);
}

// Pair-counting form of the Hubert-Arabie index.
double brute_adjusted_rand(const Partition& a, const Partition& b) {
  double both = 0, only_a = 0, only_b = 0, neither = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a.same_cluster(i, j), sb = b.same_cluster(i, j);
      if (sa && sb) ++both;
      else if (sa) ++only_a;
      else if (sb) ++only_b;
      else ++neither;
    }
  const double pairs = both + only_a + only_b + neither;
  const double cross = (both + only_a) * (both + only_b) + (only_b + neither) * (only_a + neither);
  return (pairs * (both + neither) - cross) / (pairs * pairs - cross);
}

Eigen::MatrixXd random_loglik(Eigen::Index draws, Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> z(-1.5, 0.8);
  Eigen::MatrixXd L(draws, n);
  for (Eigen::Index t = 0; t < draws; ++t)
    for (Eigen::Index i = 0; i < n; ++i) L(t, i) = z(rng);
  return L;
}

}  // namespace

TEST_CASE("adjusted Rand against pair counting") {
  Rng rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 5 + static_cast<std::size_t>(rep % 20);
    const auto a = random_partition(n, 1 + rep % 5, rng);
    const auto b = random_partition(n, 2 + rep % 4, rng);
    const double brute = brute_adjusted_rand(a, b);
    if (!std::isfinite(brute)) continue;
    CHECK(std::abs(adjusted_rand(a, b) - brute) < 1e-10);
    CHECK(adjusted_rand(a, b) == doctest::Approx(adjusted_rand(b, a)).epsilon(1e-12));
  }
  const auto p = Partition(std::vector<int>{0, 0, 1, 1, 2});
  CHECK(adjusted_rand(p, p) == 1.0);
  CHECK(adjusted_rand(p, Partition(std::vector<int>{4, 4, 0, 0, 9})) == 1.0);
}

TEST_CASE("adjusted Rand degenerate cases") {
  CHECK(adjusted_rand(Partition::single_cluster(6), Partition::singletons(6)) == 0.0);
  CHECK(adjusted_rand(Partition::singletons(6), Partition::singletons(6)) == 1.0);
  CHECK(adjusted_rand(Partition::single_cluster(6), Partition::single_cluster(6)) == 1.0);
  CHECK_THROWS_AS(adjusted_rand(Partition::singletons(3), Partition::singletons(4)), std::invalid_argument);
}

TEST_CASE("LPML and WAIC against direct sums") {
  Rng rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const Eigen::MatrixXd L = random_loglik(2 + rep * 3, 1 + rep % 7, rng);
    const double T = static_cast<double>(L.rows());
    double lp = 0.0, lppd = 0.0, pen = 0.0;
    for (Eigen::Index i = 0; i < L.cols(); ++i) {
      double inv = 0.0, lik = 0.0, mean = 0.0;
      for (Eigen::Index t = 0; t < L.rows(); ++t) {
        inv += std::exp(-L(t, i));
        lik += std::exp(L(t, i));
        mean += L(t, i) / T;
      }
      lp += -std::log(inv / T);
      lppd += std::log(lik / T);
      double ss = 0.0;
      for (Eigen::Index t = 0; t < L.rows(); ++t) ss += (L(t, i) - mean) * (L(t, i) - mean);
      pen += ss / (T - 1.0);
    }
    CHECK(std::abs(lpml(L) - lp) < 1e-10);
    CHECK(std::abs(waic(L) - (-2.0 * (lppd - pen))) < 1e-10);
    CHECK(std::abs(log_cpo(L).sum() - lp) < 1e-10);
  }
}

TEST_CASE("LPML of a single draw is the row sum") {
  Eigen::MatrixXd L(1, 4);
  L << -1.0, -2.5, -0.25, -3.0;
  CHECK(lpml(L) == doctest::Approx(-6.75).epsilon(1e-15));
  CHECK_THROWS_AS(waic(L), std::invalid_argument);
  CHECK_THROWS_AS(lpml(Eigen::MatrixXd(0, 3)), std::invalid_argument);
  Eigen::MatrixXd bad = L;
  bad(0, 1) = std::nan("");
  CHECK_THROWS(lpml(bad));
}

TEST_CASE("LPML is stable for very negative log-likelihoods") {
  Eigen::MatrixXd L(3, 2);
  L << -1000.0, -2000.0, -1001.0, -2001.0, -1002.0, -2002.0;
  CHECK(std::isfinite(lpml(L)));
  CHECK(std::isfinite(waic(L)));
}

TEST_CASE("mean squared error") {
  const std::vector<double> y{1, 2, 3}, yhat{1, 1, 5};
  CHECK(mse(y, yhat) == doctest::Approx(5.0 / 3.0));
  CHECK(mspe(y, y) == 0.0);
  const std::vector<double> short_pred{1.0};
  CHECK_THROWS_AS(mse(y, short_pred), std::invalid_argument);
}

TEST_CASE("co-clustering and least-squares partition") {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 4 + static_cast<std::size_t>(rep % 5);
    // A small pool so repeated and tied draws occur.
    std::vector<Partition> pool;
    for (int k = 0; k < 3; ++k) pool.push_back(random_partition(n, 3, rng));
    std::vector<Partition> draws;
    std::uniform_int_distribution<int> pick(0, 2);
    for (int t = 0; t < 7 + rep % 6; ++t) draws.push_back(pool[static_cast<std::size_t>(pick(rng))]);

    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& d : draws)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) pi(i, j) += d.same_cluster(i, j) ? 1.0 / draws.size() : 0.0;
    CHECK((coclustering(draws) - pi).cwiseAbs().maxCoeff() < 1e-12);

    std::size_t best = 0;
    double best_score = 1e300;
    for (std::size_t t = 0; t < draws.size(); ++t) {
      double score = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const double delta = draws[t].same_cluster(i, j) ? 1.0 : 0.0;
          score += (delta - pi(i, j)) * (delta - pi(i, j));
        }
      if (score < best_score - 1e-12) {
        best_score = score;
        best = t;
      }
    }
    CHECK(dahl_index(draws) == best);
    CHECK(dahl_estimate(draws) == draws[best]);
  }
}

TEST_CASE("least-squares partition ties go to the earliest draw") {
  const Partition a(std::vector<int>{0, 0, 1}), b(std::vector<int>{0, 1, 1});
  const std::vector<Partition> draws{a, b};
  CHECK(dahl_index(draws) == 0);
  const std::vector<Partition> swapped{b, a};
  CHECK(dahl_index(swapped) == 0);
}
