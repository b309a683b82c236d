#include "romes/scaling.hpp"

#include <stdexcept>

namespace romes {

FeatureScaling FeatureScaling::fit(const Eigen::MatrixXd& x, double margin) {
  if (x.rows() < 2) {
    throw std::invalid_argument("feature scaling needs at least two rows");
  }
  FeatureScaling s;
  const Eigen::VectorXd lo = x.colwise().minCoeff();
  const Eigen::VectorXd hi = x.colwise().maxCoeff();
  const Eigen::VectorXd span = hi - lo;
  for (int j = 0; j < x.cols(); ++j) {
    if (!(span[j] > 0)) {
      throw std::invalid_argument("constant feature cannot be scaled");
    }
  }
  s.center = 0.5 * (lo + hi);
  s.half_span = (0.5 + margin) * span;
  return s;
}

Eigen::MatrixXd FeatureScaling::apply(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd z = x;
  for (int j = 0; j < x.cols(); ++j) {
    z.col(j) = (x.col(j).array() - center[j]) / half_span[j];
  }
  return z;
}

Eigen::VectorXd FeatureScaling::apply_point(const Eigen::VectorXd& x) const {
  return ((x - center).array() / half_span.array()).matrix();
}

Eigen::VectorXd FeatureScaling::invert_point(const Eigen::VectorXd& z) const {
  return (z.array() * half_span.array()).matrix() + center;
}

}  // namespace romes
