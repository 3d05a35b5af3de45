#pragma once

#include <Eigen/Dense>

#include <vector>

namespace goalfem {

/// Quadrature rule on the reference triangle (0,0)-(1,0)-(0,1).
/// Weights sum to the reference area 1/2.
struct QuadratureRule {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;  // reference coordinates
  Eigen::VectorXd weights;
  int exactness = 0;

  int size() const { return static_cast<int>(weights.size()); }
};

/// 1D rule on [0,1].
struct LineQuadratureRule {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
  int exactness = 0;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Gauss-Legendre rule on [0,1] exact for polynomials of the given degree.
LineQuadratureRule line_rule(int degree);

/// Conical-product Gauss rule on the reference triangle, exact for total
/// degree <= degree.
QuadratureRule triangle_rule(int degree);

}  // namespace goalfem
