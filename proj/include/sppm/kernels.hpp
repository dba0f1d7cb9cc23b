#pragma once

// Data-parallel inner loops used by the cohesions, the samplers and the fit
// metrics. Every kernel has a scalar reference implementation and an AVX2
// variant; the public entry points dispatch once at startup on CPU support.
// Setting SPPM_SIMD=scalar in the environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

#include "sppm/point.hpp"

namespace sppm::kernels {

enum class Isa { Scalar, Avx2 };

/// Instruction set selected for this process.
Isa active_isa();
std::string_view isa_name(Isa isa);
/// True when the running CPU can execute the AVX2 variants.
bool avx2_supported();

/// Sum of Euclidean distances from each point to `c`.
double sum_distances(std::span<const Point> pts, Point c);
/// Largest Euclidean distance from `p` to any point; 0 for an empty span.
double max_distance(std::span<const Point> pts, Point p);
/// out[i] = ||pts[i] - p||. `out` must have pts.size() elements.
void distance_row(std::span<const Point> pts, Point p, std::span<double> out);
/// Sum of (a[i] - b[i])^2.
double sum_sq_diff(std::span<const double> a, std::span<const double> b);
/// out[i] = log N(y[i] | mean[i], sigma2).
void gaussian_logpdf(std::span<const double> y, std::span<const double> mean,
                     double sigma2, std::span<double> out);
/// Column means and sample variances (divisor rows-1) of a row-major matrix.
/// `var` is left at zero when rows < 2.
void column_moments(std::span<const double> data, std::size_t rows, std::size_t cols,
                    std::span<double> mean, std::span<double> var);

namespace scalar {
double sum_distances(std::span<const Point> pts, Point c);
double max_distance(std::span<const Point> pts, Point p);
void distance_row(std::span<const Point> pts, Point p, std::span<double> out);
double sum_sq_diff(std::span<const double> a, std::span<const double> b);
void gaussian_logpdf(std::span<const double> y, std::span<const double> mean,
                     double sigma2, std::span<double> out);
void column_moments(std::span<const double> data, std::size_t rows, std::size_t cols,
                    std::span<double> mean, std::span<double> var);
}  // namespace scalar

// Only callable when avx2_supported() is true.
namespace avx2 {
double sum_distances(std::span<const Point> pts, Point c);
double max_distance(std::span<const Point> pts, Point p);
void distance_row(std::span<const Point> pts, Point p, std::span<double> out);
double sum_sq_diff(std::span<const double> a, std::span<const double> b);
void gaussian_logpdf(std::span<const double> y, std::span<const double> mean,
                     double sigma2, std::span<double> out);
void column_moments(std::span<const double> data, std::size_t rows, std::size_t cols,
                    std::span<double> mean, std::span<double> var);
}  // namespace avx2

}  // namespace sppm::kernels
