#include <algorithm>
#include <cmath>
#include <numbers>

#include "sppm/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define SPPM_HAVE_X86 1
#include <immintrin.h>
#else
#define SPPM_HAVE_X86 0
#endif

namespace sppm::kernels::avx2 {

#if SPPM_HAVE_X86

#define SPPM_AVX2 __attribute__((target("avx2")))

namespace {

// Four points starting at p, returned as distances to c in lane order
// (0, 2, 1, 3).
SPPM_AVX2 inline __m256d distances4(const Point* p, __m256d cx, __m256d cy) {
  const double* raw = reinterpret_cast<const double*>(p);
  const __m256d a = _mm256_loadu_pd(raw);      // x0 y0 x1 y1
  const __m256d b = _mm256_loadu_pd(raw + 4);  // x2 y2 x3 y3
  const __m256d dx = _mm256_sub_pd(_mm256_unpacklo_pd(a, b), cx);
  const __m256d dy = _mm256_sub_pd(_mm256_unpackhi_pd(a, b), cy);
  return _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
}

SPPM_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

SPPM_AVX2 inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

}  // namespace

SPPM_AVX2 double sum_distances(std::span<const Point> pts, Point c) {
  const __m256d cx = _mm256_set1_pd(c.x);
  const __m256d cy = _mm256_set1_pd(c.y);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= pts.size(); i += 4) acc = _mm256_add_pd(acc, distances4(pts.data() + i, cx, cy));
  double total = hsum(acc);
  for (; i < pts.size(); ++i) total += distance(pts[i], c);
  return total;
}

SPPM_AVX2 double max_distance(std::span<const Point> pts, Point p) {
  const __m256d px = _mm256_set1_pd(p.x);
  const __m256d py = _mm256_set1_pd(p.y);
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= pts.size(); i += 4) best = _mm256_max_pd(best, distances4(pts.data() + i, px, py));
  double out = hmax(best);
  for (; i < pts.size(); ++i) out = std::max(out, distance(pts[i], p));
  return out;
}

SPPM_AVX2 void distance_row(std::span<const Point> pts, Point p, std::span<double> out) {
  const __m256d px = _mm256_set1_pd(p.x);
  const __m256d py = _mm256_set1_pd(p.y);
  std::size_t i = 0;
  for (; i + 4 <= pts.size(); i += 4) {
    const __m256d d = _mm256_permute4x64_pd(distances4(pts.data() + i, px, py), 0xD8);
    _mm256_storeu_pd(out.data() + i, d);
  }
  for (; i < pts.size(); ++i) out[i] = distance(pts[i], p);
}

SPPM_AVX2 double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= a.size(); i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = hsum(acc);
  for (; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

SPPM_AVX2 void gaussian_logpdf(std::span<const double> y, std::span<const double> mean,
                               double sigma2, std::span<double> out) {
  const double norm = -0.5 * std::log(2.0 * std::numbers::pi * sigma2);
  const double inv = -0.5 / sigma2;
  const __m256d vnorm = _mm256_set1_pd(norm);
  const __m256d vinv = _mm256_set1_pd(inv);
  std::size_t i = 0;
  for (; i + 4 <= y.size(); i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(y.data() + i), _mm256_loadu_pd(mean.data() + i));
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(vnorm, _mm256_mul_pd(vinv, _mm256_mul_pd(d, d))));
  }
  for (; i < y.size(); ++i) {
    const double d = y[i] - mean[i];
    out[i] = norm + inv * (d * d);
  }
}

SPPM_AVX2 void column_moments(std::span<const double> data, std::size_t rows, std::size_t cols,
                              std::span<double> mean, std::span<double> var) {
  std::fill(mean.begin(), mean.end(), 0.0);
  std::fill(var.begin(), var.end(), 0.0);
  if (rows == 0) return;
  const std::size_t vec_cols = cols - cols % 4;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = data.data() + r * cols;
    std::size_t c = 0;
    for (; c < vec_cols; c += 4)
      _mm256_storeu_pd(mean.data() + c,
                       _mm256_add_pd(_mm256_loadu_pd(mean.data() + c), _mm256_loadu_pd(row + c)));
    for (; c < cols; ++c) mean[c] += row[c];
  }
  const double inv_rows = 1.0 / static_cast<double>(rows);
  for (std::size_t c = 0; c < cols; ++c) mean[c] *= inv_rows;
  if (rows < 2) return;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = data.data() + r * cols;
    std::size_t c = 0;
    for (; c < vec_cols; c += 4) {
      const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(mean.data() + c));
      _mm256_storeu_pd(var.data() + c,
                       _mm256_add_pd(_mm256_loadu_pd(var.data() + c), _mm256_mul_pd(d, d)));
    }
    for (; c < cols; ++c) {
      const double d = row[c] - mean[c];
      var[c] += d * d;
    }
  }
  const double inv_dof = 1.0 / static_cast<double>(rows - 1);
  for (std::size_t c = 0; c < cols; ++c) var[c] *= inv_dof;
}

#else  // no x86: forward to the reference kernels so the symbols exist

double sum_distances(std::span<const Point> pts, Point c) { return scalar::sum_distances(pts, c); }
double max_distance(std::span<const Point> pts, Point p) { return scalar::max_distance(pts, p); }
void distance_row(std::span<const Point> pts, Point p, std::span<double> out) {
  scalar::distance_row(pts, p, out);
}
double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  return scalar::sum_sq_diff(a, b);
}
void gaussian_logpdf(std::span<const double> y, std::span<const double> mean, double sigma2,
                     std::span<double> out) {
  scalar::gaussian_logpdf(y, mean, sigma2, out);
}
void column_moments(std::span<const double> data, std::size_t rows, std::size_t cols,
                    std::span<double> mean, std::span<double> var) {
  scalar::column_moments(data, rows, cols, mean, var);
}

#endif

}  // namespace sppm::kernels::avx2
