#pragma once

// Quadrature reference values for the NIW marginals. The cluster mean is
// integrated in closed form (a Gaussian product identity), the covariance by
// nested sinh-sinh quadrature over its log-Cholesky factor
//   V = L L',  L = [[e^a, 0], [b, e^c]],  dV = 4 e^{3a + 2c} da db dc.

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "sppm/point.hpp"

namespace sppm::test {

struct NiwPrior {
  double kappa0 = 1.0;
  double nu0 = 2.0;
  Eigen::Matrix2d lambda0 = Eigen::Matrix2d::Identity();
  Eigen::Vector2d mu0 = Eigen::Vector2d::Zero();
};

inline double log_multigamma2(double x) {
  return 0.5 * std::log(std::numbers::pi) + std::lgamma(x) + std::lgamma(x - 0.5);
}

/// log int prod_i N2(s_i | m, V) NIW(m, V) dm dV by quadrature.
inline double quadrature_log_marginal(std::span<const Point> pts, const NiwPrior& prior) {
  const double n = static_cast<double>(pts.size());
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const Point& p : pts) mean += Eigen::Vector2d(p.x, p.y) / n;
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const Point& p : pts) {
    const Eigen::Vector2d d = Eigen::Vector2d(p.x, p.y) - mean;
    scatter += d * d.transpose();
  }
  const Eigen::Vector2d shift = mean - prior.mu0;
  const Eigen::Matrix2d B = scatter + prior.kappa0 * n / (prior.kappa0 + n) * shift * shift.transpose();
  const Eigen::Matrix2d A = B + prior.lambda0;
  const double nu = prior.nu0;

  // log of [mean-integrated likelihood] x [IW density] x [Jacobian] at (a, b, c).
  const double log_const = -n * std::log(2 * std::numbers::pi) + std::log(prior.kappa0 / (prior.kappa0 + n)) +
                           0.5 * nu * std::log(prior.lambda0.determinant()) - nu * std::log(2.0) -
                           log_multigamma2(0.5 * nu) + std::log(4.0);
  auto log_integrand = [&](double a, double b, double c) {
    // tr(V^-1 A) = tr(Linv A Linv') with Linv = [[e^-a, 0], [-b e^-(a+c), e^-c]].
    const double u = std::exp(-a), w = -b * std::exp(-a - c), z = std::exp(-c);
    const double tr = u * u * A(0, 0) + w * w * A(0, 0) + 2.0 * w * z * A(0, 1) + z * z * A(1, 1);
    if (!std::isfinite(tr)) return -std::numeric_limits<double>::infinity();
    const double logdet = 2.0 * (a + c);
    return log_const - 0.5 * (n + nu + 3.0) * logdet - 0.5 * tr + 3.0 * a + 2.0 * c;
  };

  // Centre the integrand at the mode of the IW(nu + n, A) factor.
  const Eigen::Matrix2d mode = A / (nu + n + 3.0);
  const Eigen::Matrix2d Lm = mode.llt().matrixL();
  const double a0 = std::log(Lm(0, 0)), b0 = Lm(1, 0), c0 = std::log(Lm(1, 1));
  const double ref = log_integrand(a0, b0, c0);

  boost::math::quadrature::sinh_sinh<double> quad(7);
  const double tol = 1e-8;
  auto inner = [&](double a, double b) {
    return quad.integrate(
        [&](double c) {
          // The far tails overflow the factor; the integrand vanishes there.
          const double v = std::exp(log_integrand(a0 + a, b0 + b, c0 + c) - ref);
          return std::isfinite(v) ? v : 0.0;
        },
        tol);
  };
  auto middle = [&](double a) { return quad.integrate([&](double b) { return inner(a, b); }, tol); };
  const double value = quad.integrate(middle, tol);
  return ref + std::log(value);
}

/// The double dip integrates the likelihood against the posterior:
/// int L^2 pi / int L pi. Squaring each Gaussian factor is the likelihood of
/// every point observed twice, so it is a ratio of two prior marginals.
inline double quadrature_log_double_dip(std::span<const Point> pts, const NiwPrior& prior) {
  std::vector<Point> twice(pts.begin(), pts.end());
  twice.insert(twice.end(), pts.begin(), pts.end());
  return quadrature_log_marginal(twice, prior) - quadrature_log_marginal(pts, prior);
}

}  // namespace sppm::test
