#include "sppm/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace sppm {

ColumnTransform ColumnTransform::identity(Eigen::Index cols) {
  return {Eigen::VectorXd::Zero(cols), Eigen::VectorXd::Ones(cols)};
}

ColumnTransform ColumnTransform::fit(const Eigen::MatrixXd& m) {
  ColumnTransform t = identity(m.cols());
  if (m.rows() < 2) return t;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double mean = m.col(j).mean();
    const double var = (m.col(j).array() - mean).square().sum() / static_cast<double>(m.rows() - 1);
    t.center(j) = mean;
    t.scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return t;
}

Eigen::MatrixXd ColumnTransform::apply(const Eigen::MatrixXd& m) const {
  if (m.cols() != center.size()) throw std::invalid_argument("ColumnTransform: column count mismatch");
  return (m.rowwise() - center.transpose()).array().rowwise() / scale.transpose().array();
}

Eigen::MatrixXd ColumnTransform::invert(const Eigen::MatrixXd& m) const {
  if (m.cols() != center.size()) throw std::invalid_argument("ColumnTransform: column count mismatch");
  return (m.array().rowwise() * scale.transpose().array()).matrix().rowwise() + center.transpose();
}

void Dataset::validate() const {
  const auto n = static_cast<Eigen::Index>(loc.size());
  if (y.rows() != n) throw std::invalid_argument("response rows do not match the number of locations");
  if (y.cols() != 1 && y.cols() != 2) throw std::invalid_argument("response must have one or two columns");
  if (x.cols() > 0 && x.rows() != n) throw std::invalid_argument("covariate rows do not match the number of locations");
  if (!y.allFinite() || !x.allFinite()) throw std::invalid_argument("data contain non-finite values");
}

PreparedData prepare_training(const std::vector<Point>& raw_coords, const Eigen::MatrixXd& y,
                              const Eigen::MatrixXd& x, bool standardize_values) {
  PreparedData out{{LocationSet::standardize(raw_coords), y, x},
                   ColumnTransform::identity(y.cols()),
                   ColumnTransform::identity(x.cols())};
  if (x.cols() > 0 && x.rows() != y.rows()) throw std::invalid_argument("covariate rows do not match responses");
  if (standardize_values) {
    out.y_transform = ColumnTransform::fit(y);
    out.x_transform = ColumnTransform::fit(x);
    out.data.y = out.y_transform.apply(y);
    out.data.x = out.x_transform.apply(x);
  }
  out.data.validate();
  return out;
}

}  // namespace sppm
