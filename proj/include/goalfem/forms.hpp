#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "goalfem/space.hpp"

namespace goalfem {

enum class ExprKind {
  Test,
  Trial,
  Coefficient,
  ScalarFunction,
  SpatialCoordinate,
  FacetNormal,
  Constant,
  Grad,
  Div,
  Inner,
  Add,
  Sub,
  Mul,
  Power,
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

/// One node of an immutable expression tree. shape: 0 = scalar, 1 = 2-vector.
struct ExprNode {
  ExprKind kind;
  int shape = 0;
  std::vector<ExprPtr> children;

  // Payloads.
  double scalar_value = 0.0;          // Constant (scalar)
  Vec2 vector_value = Vec2::Zero();   // Constant (vector)
  int exponent = 0;                   // Power
  std::shared_ptr<const FunctionSpace> space;  // Test/Trial
  std::shared_ptr<FEFunction> coefficient;     // Coefficient
  std::function<double(const Vec2&)> callable; // ScalarFunction
  int degree_hint = 0;                // ScalarFunction polynomial degree estimate
};

/// Value-semantics wrapper over a shared expression node.
class FormExpr {
 public:
  FormExpr() = default;
  explicit FormExpr(ExprPtr node) : node_(std::move(node)) {}

  const ExprNode& node() const { return *node_; }
  ExprPtr ptr() const { return node_; }
  bool valid() const { return node_ != nullptr; }
  int shape() const { return node_->shape; }

  static FormExpr test(std::shared_ptr<const FunctionSpace> space);
  static FormExpr trial(std::shared_ptr<const FunctionSpace> space);
  static FormExpr coefficient(std::shared_ptr<FEFunction> f);
  static FormExpr constant(double value);
  static FormExpr constant_vector(const Vec2& value);
  static FormExpr spatial_coordinate();
  static FormExpr facet_normal();
  /// Pointwise scalar data given as a callable; degree_hint drives quadrature
  /// selection (use the exact degree for polynomial data).
  static FormExpr scalar_function(std::function<double(const Vec2&)> f,
                                  int degree_hint);

  bool is_zero() const;

 private:
  ExprPtr node_;
};

FormExpr grad(const FormExpr& e);
FormExpr div(const FormExpr& e);
FormExpr inner(const FormExpr& a, const FormExpr& b);
FormExpr pow(const FormExpr& e, int n);
FormExpr operator+(const FormExpr& a, const FormExpr& b);
FormExpr operator-(const FormExpr& a, const FormExpr& b);
FormExpr operator-(const FormExpr& a);
FormExpr operator*(const FormExpr& a, const FormExpr& b);
FormExpr operator*(double a, const FormExpr& b);

enum class MeasureKind { Cell, ExteriorFacet };

struct Measure {
  MeasureKind kind = MeasureKind::Cell;
  int marker = -1;  // ExteriorFacet only
};

inline Measure dx() { return {MeasureKind::Cell, -1}; }
inline Measure ds(int marker) { return {MeasureKind::ExteriorFacet, marker}; }

struct FormTerm {
  FormExpr integrand;
  Measure measure;
};

/// A sum of cell/exterior-facet integrals. Arity 0 = functional,
/// 1 = linear (test only), 2 = bilinear (test and trial).
class Form {
 public:
  Form() = default;
  Form(std::vector<FormTerm> terms);

  const std::vector<FormTerm>& terms() const { return terms_; }
  int arity() const { return arity_; }
  bool has_test() const { return has_test_; }
  bool has_trial() const { return has_trial_; }
  std::shared_ptr<const FunctionSpace> test_space() const { return test_space_; }
  std::shared_ptr<const FunctionSpace> trial_space() const { return trial_space_; }

  Form operator+(const Form& other) const;
  Form operator-() const;

 private:
  std::vector<FormTerm> terms_;
  int arity_ = 0;
  bool has_test_ = false;
  bool has_trial_ = false;
  std::shared_ptr<const FunctionSpace> test_space_;
  std::shared_ptr<const FunctionSpace> trial_space_;
};

Form operator*(const FormExpr& integrand, const Measure& measure);

/// Gateaux derivative of F with respect to the coefficient u, linearized
/// at u's current values. The perturbation direction becomes a TrialFunction
/// when F contains a test function (residual forms), and a TestFunction
/// otherwise (goal functionals).
Form derivative(const Form& F, const std::shared_ptr<FEFunction>& u);

/// Swap test and trial roles: adjoint(a)(v, w) = a(w, v).
Form adjoint(const Form& a);

/// Weak residual r(v) = -F(u_h; v) of a semilinear form.
Form residual_form(const Form& F);

/// Weak residual r(v) = L(v) - a(u_h, v) of a linear problem.
Form residual_form(const Form& a, const Form& L,
                   const std::shared_ptr<FEFunction>& u_h);

/// Replace the trial function by a coefficient (action of a bilinear form).
Form replace_trial(const Form& a, const std::shared_ptr<FEFunction>& u_h);

/// Polynomial degree estimate of an integrand (for quadrature selection).
/// test_degree_override, when >= 0, is used as the degree of the test
/// function instead of its space degree (for substituted local test fields).
int degree_estimate(const FormExpr& e, int test_degree_override = -1);

/// Distinct coefficients appearing in an expression.
void collect_coefficients(const FormExpr& e,
                          std::vector<std::shared_ptr<FEFunction>>& out);

}  // namespace goalfem
