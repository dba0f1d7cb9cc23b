#include "sppm/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sppm/correlation.hpp"

namespace sppm {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

int quadrant(double x, double y, double cx, double cy) { return (x >= cx ? 1 : 0) + (y >= cy ? 2 : 0); }

}  // namespace

Layout parse_layout(std::string_view s) {
  const auto v = lower(s);
  if (v == "square") return Layout::Square;
  if (v == "mixture" || v == "irregular" || v == "random") return Layout::Mixture;
  throw std::invalid_argument("unknown layout '" + std::string(s) + "' (expected square or mixture)");
}

ErrorKind parse_error_kind(std::string_view s) {
  const auto v = lower(s);
  if (v == "gaussian" || v == "normal") return ErrorKind::Gaussian;
  if (v == "mixture") return ErrorKind::Mixture;
  throw std::invalid_argument("unknown error kind '" + std::string(s) + "' (expected gaussian or mixture)");
}

std::string_view layout_name(Layout l) { return l == Layout::Square ? "square" : "mixture"; }
std::string_view error_name(ErrorKind e) { return e == ErrorKind::Gaussian ? "gaussian" : "mixture"; }

FieldRegime parse_field_regime(std::string_view s) {
  const auto v = lower(s);
  if (v == "global") return FieldRegime::Global;
  if (v == "local_means") return FieldRegime::LocalMeans;
  if (v == "local_gps") return FieldRegime::LocalGps;
  throw std::invalid_argument("unknown regime '" + std::string(s) + "' (expected global, local_means or local_gps)");
}

GeneratedLocations gen_locations(Layout layout, std::size_t n, Rng& rng) {
  if (n < 8) throw std::invalid_argument("gen_locations: n must be at least 8");
  GeneratedLocations out;
  out.coords.reserve(n);
  out.group.reserve(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> component(0, 3);
  constexpr double kMeans[4][2] = {{-0.5, -0.5}, {0.5, -0.5}, {-0.5, 0.5}, {0.5, 0.5}};
  constexpr double kSd = 0.22;
  for (std::size_t i = 0; i < n; ++i) {
    if (layout == Layout::Square) {
      const double x = unit(rng);
      const double y = unit(rng);
      out.coords.push_back({x, y});
      out.group.push_back(quadrant(x, y, 0.5, 0.5));
    } else {
      const int g = component(rng);
      const double x = kMeans[g][0] + kSd * std_normal(rng);
      const double y = kMeans[g][1] + kSd * std_normal(rng);
      out.coords.push_back({x, y});
      out.group.push_back(g);
    }
  }
  out.truth = Partition(out.group);
  return out;
}

Eigen::VectorXd gen_gp_field(std::span<const Point> pts, double tau2, double phi, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  if (tau2 < 0.0 || !(phi > 0.0)) throw std::invalid_argument("gen_gp_field: need tau2 >= 0 and phi > 0");
  if (tau2 == 0.0) return Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      cov(i, j) = cov(j, i) = exp_cov(distance(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]), tau2, phi);
  cov.diagonal().array() += 1e-8;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::runtime_error("gen_gp_field: covariance factorization failed");
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = std_normal(rng);
  return llt.matrixL() * z;
}

void SimScenario::validate() const {
  if (n_train < 8 || n_test < 1) throw std::invalid_argument("scenario needs n_train >= 8 and n_test >= 1");
  if (n_clusters != 1 && n_clusters != 4) throw std::invalid_argument("n_clusters must be 1 or 4");
  if (mu_star.size() != 4) throw std::invalid_argument("mu_star needs four values");
  if (gp_tau2 < 0.0 || !(gp_phi > 0.0) || !(sigma2 > 0.0) || !(x_max > 0.0))
    throw std::invalid_argument("scenario variances and ranges must be positive");
}

SimData gen_dataset(const SimScenario& sc) {
  sc.validate();
  Rng rng(sc.seed);
  const std::size_t n = sc.n_train + sc.n_test;
  const auto locs = gen_locations(sc.layout, n, rng);
  const Eigen::VectorXd theta = gen_gp_field(locs.coords, sc.gp_tau2, sc.gp_phi, rng);
  std::uniform_real_distribution<double> ux(0.0, sc.x_max);
  const double sd = std::sqrt(sc.sigma2);

  auto fill = [&](SimSplit& split, std::size_t from, std::size_t count) {
    split.coords.assign(locs.coords.begin() + static_cast<long>(from), locs.coords.begin() + static_cast<long>(from + count));
    split.y.resize(static_cast<Eigen::Index>(count));
    split.x.resize(static_cast<Eigen::Index>(count), 1);
    split.theta = theta.segment(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(count));
    split.error.resize(static_cast<Eigen::Index>(count));
    split.group.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const int g = sc.n_clusters == 4 ? locs.group[from + i] : 0;
      const double mu = sc.n_clusters == 4 ? sc.mu_star[static_cast<std::size_t>(g)] : 0.0;
      const double x = ux(rng);
      double e = sd * std_normal(rng);
      if (sc.error == ErrorKind::Mixture && uniform01(rng) < 0.5) e += 1.0;
      split.group[i] = g;
      split.x(r, 0) = x;
      split.error(r) = e;
      split.y(r) = mu + x * sc.beta + split.theta(r) + e;
    }
  };
  SimData out;
  fill(out.train, 0, sc.n_train);
  fill(out.test, sc.n_train, sc.n_test);
  out.train_truth = Partition(out.train.group);
  return out;
}

void JointScenario::validate() const {
  if (n_train < 8 || n_test < 1) throw std::invalid_argument("scenario needs n_train >= 8 and n_test >= 1");
  if (means.size() != 4) throw std::invalid_argument("joint scenario needs four group means");
  if (sigma.llt().info() != Eigen::Success || sigma(0, 1) != sigma(1, 0))
    throw std::invalid_argument("Sigma must be symmetric positive definite");
  if ((tau2.array() < 0.0).any() || !(phi.array() > 0.0).all()) throw std::invalid_argument("invalid GP parameters");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
}

JointSimData gen_joint_dataset(const JointScenario& sc) {
  sc.validate();
  Rng rng(sc.seed);
  const std::size_t n = sc.n_train + sc.n_test;
  const auto locs = gen_locations(sc.layout, n, rng);
  Eigen::MatrixXd latent(static_cast<Eigen::Index>(n), 2);
  for (int j = 0; j < 2; ++j) latent.col(j) = gen_gp_field(locs.coords, sc.tau2(j), sc.phi(j), rng);
  Eigen::Matrix2d a;
  a << 1.0, sc.gamma, sc.gamma, 1.0;
  const Eigen::MatrixXd field = latent * a.transpose();
  const Eigen::Matrix2d chol = sc.sigma.llt().matrixL();
  auto fill = [&](JointSplit& split, std::size_t from, std::size_t count) {
    split.coords.assign(locs.coords.begin() + static_cast<long>(from), locs.coords.begin() + static_cast<long>(from + count));
    split.group.assign(locs.group.begin() + static_cast<long>(from), locs.group.begin() + static_cast<long>(from + count));
    split.field = field.middleRows(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(count));
    split.y.resize(static_cast<Eigen::Index>(count), 2);
    for (std::size_t i = 0; i < count; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const Eigen::Vector2d e = chol * Eigen::Vector2d(std_normal(rng), std_normal(rng));
      split.y.row(r) = (sc.means[static_cast<std::size_t>(split.group[i])] + split.field.row(r).transpose() + e).transpose();
    }
  };
  JointSimData out;
  fill(out.train, 0, sc.n_train);
  fill(out.test, sc.n_train, sc.n_test);
  out.train_truth = Partition(out.train.group);
  return out;
}

GridField gen_regime_fields(FieldRegime regime, const GridSpec& grid, Rng& rng) {
  if (grid.nx < 2 || grid.ny < 2 || !(grid.width > 0.0) || !(grid.height > 0.0))
    throw std::invalid_argument("gen_regime_fields: grid needs at least 2 x 2 points and positive extent");
  GridField out;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.width * i / (grid.nx - 1);
      const double y = grid.height * j / (grid.ny - 1);
      out.coords.push_back({x, y});
      out.group.push_back(quadrant(x, y, 0.5 * grid.width, 0.5 * grid.height));
    }
  const auto n = static_cast<Eigen::Index>(out.coords.size());
  constexpr double kNugget = 0.1;
  constexpr double kSill = 2.0;
  constexpr double kRange = 6.0;
  constexpr double kMeans[4] = {1.0, -0.5, 0.25, -1.0};
  constexpr double kLocalSill[4] = {1.0, 2.0, 3.0, 4.0};
  constexpr double kLocalRange[4] = {0.5, 10.0, 5.0, 20.0};
  out.value = Eigen::VectorXd::Zero(n);
  if (regime == FieldRegime::LocalGps) {
    for (int g = 0; g < 4; ++g) {
      std::vector<Point> pts;
      std::vector<Eigen::Index> where;
      for (Eigen::Index i = 0; i < n; ++i)
        if (out.group[static_cast<std::size_t>(i)] == g) {
          pts.push_back(out.coords[static_cast<std::size_t>(i)]);
          where.push_back(i);
        }
      const Eigen::VectorXd f = gen_gp_field(pts, kLocalSill[g], decay_from_range(kLocalRange[g]), rng);
      for (std::size_t k = 0; k < where.size(); ++k) out.value(where[k]) = f(static_cast<Eigen::Index>(k));
    }
  } else {
    out.value = gen_gp_field(out.coords, kSill, decay_from_range(kRange), rng);
    if (regime == FieldRegime::LocalMeans)
      for (Eigen::Index i = 0; i < n; ++i) out.value(i) += kMeans[out.group[static_cast<std::size_t>(i)]];
  }
  for (Eigen::Index i = 0; i < n; ++i) out.value(i) += std::sqrt(kNugget) * std_normal(rng);
  return out;
}

}  // namespace sppm
