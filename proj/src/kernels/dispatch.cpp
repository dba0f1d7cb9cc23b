#include <cstdlib>
#include <string_view>

#include "sppm/kernels.hpp"

namespace sppm::kernels {

namespace {

struct Table {
  Isa isa;
  double (*sum_distances)(std::span<const Point>, Point);
  double (*max_distance)(std::span<const Point>, Point);
  void (*distance_row)(std::span<const Point>, Point, std::span<double>);
  double (*sum_sq_diff)(std::span<const double>, std::span<const double>);
  void (*gaussian_logpdf)(std::span<const double>, std::span<const double>, double, std::span<double>);
  void (*column_moments)(std::span<const double>, std::size_t, std::size_t, std::span<double>,
                         std::span<double>);
};

constexpr Table kScalar{Isa::Scalar,         scalar::sum_distances,   scalar::max_distance,
                        scalar::distance_row, scalar::sum_sq_diff,     scalar::gaussian_logpdf,
                        scalar::column_moments};
constexpr Table kAvx2{Isa::Avx2,          avx2::sum_distances, avx2::max_distance,
                      avx2::distance_row, avx2::sum_sq_diff,   avx2::gaussian_logpdf,
                      avx2::column_moments};

const Table& select() {
  static const Table& table = [] () -> const Table& {
    const char* env = std::getenv("SPPM_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return kScalar;
    return avx2_supported() ? kAvx2 : kScalar;
  }();
  return table;
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported;
#else
  return false;
#endif
}

Isa active_isa() { return select().isa; }

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

double sum_distances(std::span<const Point> pts, Point c) { return select().sum_distances(pts, c); }

double max_distance(std::span<const Point> pts, Point p) { return select().max_distance(pts, p); }

void distance_row(std::span<const Point> pts, Point p, std::span<double> out) {
  select().distance_row(pts, p, out);
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  return select().sum_sq_diff(a, b);
}

void gaussian_logpdf(std::span<const double> y, std::span<const double> mean, double sigma2,
                     std::span<double> out) {
  select().gaussian_logpdf(y, mean, sigma2, out);
}

void column_moments(std::span<const double> data, std::size_t rows, std::size_t cols,
                    std::span<double> mean, std::span<double> var) {
  select().column_moments(data, rows, cols, mean, var);
}

}  // namespace sppm::kernels
