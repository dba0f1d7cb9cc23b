#include <algorithm>
#include <cmath>
#include <numbers>

#include "sppm/kernels.hpp"

namespace sppm::kernels::scalar {

double sum_distances(std::span<const Point> pts, Point c) {
  double total = 0.0;
  for (const Point& p : pts) total += distance(p, c);
  return total;
}

double max_distance(std::span<const Point> pts, Point p) {
  double best = 0.0;
  for (const Point& q : pts) best = std::max(best, distance(p, q));
  return best;
}

void distance_row(std::span<const Point> pts, Point p, std::span<double> out) {
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = distance(pts[i], p);
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

void gaussian_logpdf(std::span<const double> y, std::span<const double> mean,
                     double sigma2, std::span<double> out) {
  const double norm = -0.5 * std::log(2.0 * std::numbers::pi * sigma2);
  const double inv = -0.5 / sigma2;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - mean[i];
    out[i] = norm + inv * (d * d);
  }
}

void column_moments(std::span<const double> data, std::size_t rows, std::size_t cols,
                    std::span<double> mean, std::span<double> var) {
  std::fill(mean.begin(), mean.end(), 0.0);
  std::fill(var.begin(), var.end(), 0.0);
  if (rows == 0) return;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = data.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) mean[c] += row[c];
  }
  for (std::size_t c = 0; c < cols; ++c) mean[c] /= static_cast<double>(rows);
  if (rows < 2) return;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = data.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      const double d = row[c] - mean[c];
      var[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < cols; ++c) var[c] /= static_cast<double>(rows - 1);
}

}  // namespace sppm::kernels::scalar
