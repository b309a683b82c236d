#pragma once

#include <Eigen/Dense>

namespace romes {

/// Per-feature affine map onto [-1, 1], fitted with a 10% margin on each
/// side of the observed range so that nearby prediction points stay inside
/// the nominal domain of polynomial bases.
struct FeatureScaling {
  Eigen::VectorXd center;     // midpoint of the enlarged domain
  Eigen::VectorXd half_span;  // half width of the enlarged domain

  static FeatureScaling fit(const Eigen::MatrixXd& x, double margin = 0.1);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd apply_point(const Eigen::VectorXd& x) const;
  Eigen::VectorXd invert_point(const Eigen::VectorXd& z) const;
};

}  // namespace romes
