#include "goalfem/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace goalfem {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, p1 = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * t * p1 - k * p2) / (k + 1.0);
      }
      double dp = n * (t * p0 - p1) / (t * t - 1.0);
      double dt = p0 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    p0 = 1.0;
    p1 = 0.0;
    for (int k = 0; k < n; ++k) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k + 1.0) * t * p1 - k * p2) / (k + 1.0);
    }
    double dp = n * (t * p0 - p1) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

LineQuadratureRule line_rule(int degree) {
  if (degree < 0) throw std::invalid_argument("line_rule: negative degree");
  int n = degree / 2 + 1;  // 2n - 1 >= degree
  Eigen::VectorXd x, w;
  gauss_legendre(n, x, w);
  LineQuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = 0.5 * (x[i] + 1.0);
    rule.weights[i] = 0.5 * w[i];
  }
  rule.exactness = 2 * n - 1;
  return rule;
}

QuadratureRule triangle_rule(int degree) {
  if (degree < 0) throw std::invalid_argument("triangle_rule: negative degree");
  // Collapsed square: x = s, y = t (1 - s), Jacobian (1 - s). A monomial of
  // total degree d becomes degree <= d + 1 in s and <= d in t.
  int n = (degree + 3) / 2;  // 2n - 1 >= degree + 1
  Eigen::VectorXd x, w;
  gauss_legendre(n, x, w);
  QuadratureRule rule;
  rule.points.resize(n * n, 2);
  rule.weights.resize(n * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    double s = 0.5 * (x[i] + 1.0);
    double ws = 0.5 * w[i];
    for (int j = 0; j < n; ++j, ++k) {
      double t = 0.5 * (x[j] + 1.0);
      double wt = 0.5 * w[j];
      rule.points(k, 0) = s;
      rule.points(k, 1) = t * (1.0 - s);
      rule.weights[k] = ws * wt * (1.0 - s);
    }
  }
  rule.exactness = degree;
  return rule;
}

}  // namespace goalfem
