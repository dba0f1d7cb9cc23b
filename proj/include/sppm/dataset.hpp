#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sppm/spatial_partition.hpp"

namespace sppm {

/// Per-column centering and scaling, x_std = (x - center) / scale.
struct ColumnTransform {
  Eigen::VectorXd center;
  Eigen::VectorXd scale;

  static ColumnTransform identity(Eigen::Index cols);
  /// Mean 0 and sample sd 1 per column; constant columns keep scale 1.
  static ColumnTransform fit(const Eigen::MatrixXd& m);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& m) const;
};

/// Responses (one or two columns) and optional covariates at a set of
/// locations. Rows of y and x follow the location order.
struct Dataset {
  LocationSet loc;
  Eigen::MatrixXd y;
  Eigen::MatrixXd x;

  std::size_t size() const { return loc.size(); }
  bool bivariate() const { return y.cols() == 2; }
  Eigen::Index num_covariates() const { return x.cols(); }

  /// Throws std::invalid_argument on inconsistent shapes, non-finite values
  /// or a response with other than one or two columns.
  void validate() const;
};

/// Training data on the working scale with the maps needed to place new
/// sites and to report predictions on the original response scale.
struct PreparedData {
  Dataset data;
  ColumnTransform y_transform;
  ColumnTransform x_transform;
};

/// Standardizes the coordinates and, when `standardize_values` is set, the
/// response and covariate columns.
PreparedData prepare_training(const std::vector<Point>& raw_coords, const Eigen::MatrixXd& y,
                              const Eigen::MatrixXd& x, bool standardize_values);

}  // namespace sppm
