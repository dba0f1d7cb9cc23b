#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "sppm/point.hpp"
#include "sppm/rng.hpp"

namespace sppm::test {

inline std::vector<Point> random_points(std::size_t n, Rng& rng, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return pts;
}

inline std::vector<Point> grid_points(int nx, int ny) {
  std::vector<Point> pts;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) pts.push_back({static_cast<double>(i), static_cast<double>(j)});
  return pts;
}

/// Monte Carlo standard error of a chain mean from non-overlapping batch means.
inline double batch_means_se(const std::vector<double>& chain, std::size_t batches = 40) {
  const std::size_t len = chain.size() / batches;
  if (len == 0) return std::numeric_limits<double>::infinity();
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t t = 0; t < len; ++t) means[b] += chain[b * len + t];
    means[b] /= static_cast<double>(len);
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(batches);
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  return std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace sppm::test
