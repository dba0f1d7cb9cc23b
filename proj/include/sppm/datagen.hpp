#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sppm/point.hpp"
#include "sppm/rng.hpp"
#include "sppm/spatial_partition.hpp"

namespace sppm {

enum class Layout { Square, Mixture };
enum class ErrorKind { Gaussian, Mixture };

Layout parse_layout(std::string_view s);
ErrorKind parse_error_kind(std::string_view s);
std::string_view layout_name(Layout l);
std::string_view error_name(ErrorKind e);

struct GeneratedLocations {
  std::vector<Point> coords;
  /// Quadrant (square) or mixture component, 0..3 in the fixed order
  /// lower-left, lower-right, upper-left, upper-right.
  std::vector<int> group;
  Partition truth;
};

/// Square: uniform on the unit square, grouped by quadrant. Mixture: equal
/// weight isotropic Gaussians centred at (+-0.5, +-0.5) with sd 0.22 per axis.
/// Throws std::invalid_argument for n < 8.
GeneratedLocations gen_locations(Layout layout, std::size_t n, Rng& rng);

/// One draw of a zero-mean GP with covariance tau2 exp(-phi d) (plus 1e-8 on
/// the diagonal). Throws std::runtime_error if the factorization fails.
Eigen::VectorXd gen_gp_field(std::span<const Point> pts, double tau2, double phi, Rng& rng);

struct SimScenario {
  std::size_t n_train = 100;
  std::size_t n_test = 100;
  int n_clusters = 4;
  Layout layout = Layout::Square;
  ErrorKind error = ErrorKind::Gaussian;
  double gp_tau2 = 2.0;
  double gp_phi = 6.0;
  std::vector<double> mu_star{0.0, 1.0, -1.0, -2.0};
  double beta = 1.0;
  double sigma2 = 0.1;
  double x_max = 10.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Raw (unstandardized) synthetic data for one split.
struct SimSplit {
  std::vector<Point> coords;
  Eigen::VectorXd y;
  Eigen::MatrixXd x;  // n x 1
  std::vector<int> group;
  Eigen::VectorXd theta;
  Eigen::VectorXd error;
};

struct SimData {
  SimSplit train;
  SimSplit test;
  /// Partition of the training sites implied by the generating groups.
  Partition train_truth;
};

/// y = mu*_{group} + x beta + theta(s) + e on n_train + n_test sites; the
/// first n_train generated sites form the training split. With one cluster
/// mu* is identically 0 and the truth is a single cluster.
SimData gen_dataset(const SimScenario& scenario);

/// Bivariate data from four spatial groups with a coregionalized field:
///   y_i = m_{group} + A(gamma) [z1(s_i), z2(s_i)]' + e_i,  e_i ~ N2(0, Sigma),
/// z_j independent exponential GPs with sill tau2_j and decay phi_j.
struct JointScenario {
  std::size_t n_train = 100;
  std::size_t n_test = 100;
  Layout layout = Layout::Square;
  std::vector<Eigen::Vector2d> means{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(2.0, -1.0),
                                     Eigen::Vector2d(-1.0, 2.0), Eigen::Vector2d(-2.0, -2.0)};
  Eigen::Matrix2d sigma = (Eigen::Matrix2d() << 0.5, 0.25, 0.25, 0.5).finished();
  Eigen::Vector2d tau2 = Eigen::Vector2d(1.0, 1.0);
  Eigen::Vector2d phi = Eigen::Vector2d(3.0, 3.0);
  double gamma = 0.5;
  std::uint64_t seed = 1;

  void validate() const;
};

struct JointSplit {
  std::vector<Point> coords;
  Eigen::MatrixXd y;      // n x 2
  Eigen::MatrixXd field;  // n x 2, the coregionalized field
  std::vector<int> group;
};

struct JointSimData {
  JointSplit train;
  JointSplit test;
  Partition train_truth;
};

JointSimData gen_joint_dataset(const JointScenario& scenario);

enum class FieldRegime { Global, LocalMeans, LocalGps };
FieldRegime parse_field_regime(std::string_view s);

struct GridSpec {
  int nx = 50;
  int ny = 50;
  double width = 10.0;
  double height = 10.0;
};

struct GridField {
  std::vector<Point> coords;
  std::vector<int> group;
  Eigen::VectorXd value;
};

/// Fields on a regular grid split into four quadrant rectangles:
/// Global: one GP (partial sill 2, effective range 6) plus nugget 0.1;
/// LocalMeans: quadrant means (1, -0.5, 0.25, -1) added to that field;
/// LocalGps: independent quadrant GPs with sills (1, 2, 3, 4) and effective
/// ranges (0.5, 10, 5, 20), plus nugget 0.1.
GridField gen_regime_fields(FieldRegime regime, const GridSpec& grid, Rng& rng);

}  // namespace sppm
