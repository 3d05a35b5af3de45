#include "goalfem/forms.hpp"

#include <algorithm>
#include <stdexcept>

namespace goalfem {

namespace {

ExprPtr make_node(ExprKind kind, int shape, std::vector<ExprPtr> children = {}) {
  auto node = std::make_shared<ExprNode>();
  node->kind = kind;
  node->shape = shape;
  node->children = std::move(children);
  return node;
}

FormExpr zero(int shape) {
  if (shape == 0) return FormExpr::constant(0.0);
  return FormExpr::constant_vector(Vec2::Zero());
}

bool node_is_zero(const ExprNode& n) {
  return n.kind == ExprKind::Constant &&
         ((n.shape == 0 && n.scalar_value == 0.0) ||
          (n.shape == 1 && n.vector_value.isZero(0.0)));
}

bool node_is_one(const ExprNode& n) {
  return n.kind == ExprKind::Constant && n.shape == 0 && n.scalar_value == 1.0;
}

// Structural multiplicity of the test function; > 1 is a nonlinearity.
int test_multiplicity(const ExprNode& n) {
  switch (n.kind) {
    case ExprKind::Test: return 1;
    case ExprKind::Mul:
    case ExprKind::Inner:
      return test_multiplicity(*n.children[0]) + test_multiplicity(*n.children[1]);
    case ExprKind::Power: {
      int d = test_multiplicity(*n.children[0]);
      return d == 0 ? 0 : d * n.exponent;
    }
    case ExprKind::Add:
    case ExprKind::Sub:
      return std::max(test_multiplicity(*n.children[0]),
                      test_multiplicity(*n.children[1]));
    case ExprKind::Grad:
    case ExprKind::Div:
      return test_multiplicity(*n.children[0]);
    default: return 0;
  }
}

void find_arguments(const ExprNode& n, bool& has_test, bool& has_trial,
                    std::shared_ptr<const FunctionSpace>& test_space,
                    std::shared_ptr<const FunctionSpace>& trial_space) {
  if (n.kind == ExprKind::Test) {
    has_test = true;
    if (test_space && test_space != n.space)
      throw std::runtime_error("form: multiple test spaces");
    test_space = n.space;
  } else if (n.kind == ExprKind::Trial) {
    has_trial = true;
    if (trial_space && trial_space != n.space)
      throw std::runtime_error("form: multiple trial spaces");
    trial_space = n.space;
  }
  for (const auto& c : n.children)
    find_arguments(*c, has_test, has_trial, test_space, trial_space);
}

}  // namespace

FormExpr FormExpr::test(std::shared_ptr<const FunctionSpace> space) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::Test;
  node->space = std::move(space);
  return FormExpr(node);
}

FormExpr FormExpr::trial(std::shared_ptr<const FunctionSpace> space) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::Trial;
  node->space = std::move(space);
  return FormExpr(node);
}

FormExpr FormExpr::coefficient(std::shared_ptr<FEFunction> f) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::Coefficient;
  node->coefficient = std::move(f);
  return FormExpr(node);
}

FormExpr FormExpr::constant(double value) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::Constant;
  node->scalar_value = value;
  return FormExpr(node);
}

FormExpr FormExpr::constant_vector(const Vec2& value) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::Constant;
  node->shape = 1;
  node->vector_value = value;
  return FormExpr(node);
}

FormExpr FormExpr::spatial_coordinate() {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::SpatialCoordinate;
  node->shape = 1;
  return FormExpr(node);
}

FormExpr FormExpr::facet_normal() {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::FacetNormal;
  node->shape = 1;
  return FormExpr(node);
}

FormExpr FormExpr::scalar_function(std::function<double(const Vec2&)> f,
                                   int degree_hint) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::ScalarFunction;
  node->callable = std::move(f);
  node->degree_hint = degree_hint;
  return FormExpr(node);
}

bool FormExpr::is_zero() const { return node_ && node_is_zero(*node_); }

FormExpr grad(const FormExpr& e) {
  if (e.shape() != 0) throw std::runtime_error("grad: scalar operand required");
  if (e.is_zero()) return zero(1);
  return FormExpr(make_node(ExprKind::Grad, 1, {e.ptr()}));
}

FormExpr div(const FormExpr& e) {
  if (e.shape() != 1) throw std::runtime_error("div: vector operand required");
  if (e.is_zero()) return zero(0);
  return FormExpr(make_node(ExprKind::Div, 0, {e.ptr()}));
}

FormExpr inner(const FormExpr& a, const FormExpr& b) {
  if (a.shape() != b.shape())
    throw std::runtime_error("inner: operand shapes differ");
  if (a.is_zero() || b.is_zero()) return zero(0);
  if (a.shape() == 0) return a * b;
  return FormExpr(make_node(ExprKind::Inner, 0, {a.ptr(), b.ptr()}));
}

FormExpr pow(const FormExpr& e, int n) {
  if (e.shape() != 0) throw std::runtime_error("pow: scalar operand required");
  if (n < 0) throw std::runtime_error("pow: nonnegative exponent required");
  if (n == 0) return FormExpr::constant(1.0);
  if (n == 1) return e;
  if (e.node().kind == ExprKind::Constant)
    return FormExpr::constant(std::pow(e.node().scalar_value, n));
  auto node = make_node(ExprKind::Power, 0, {e.ptr()});
  const_cast<ExprNode&>(*node).exponent = n;
  return FormExpr(node);
}

FormExpr operator+(const FormExpr& a, const FormExpr& b) {
  if (a.shape() != b.shape()) throw std::runtime_error("add: shapes differ");
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.node().kind == ExprKind::Constant && b.node().kind == ExprKind::Constant) {
    if (a.shape() == 0)
      return FormExpr::constant(a.node().scalar_value + b.node().scalar_value);
    return FormExpr::constant_vector(a.node().vector_value + b.node().vector_value);
  }
  return FormExpr(make_node(ExprKind::Add, a.shape(), {a.ptr(), b.ptr()}));
}

FormExpr operator-(const FormExpr& a, const FormExpr& b) {
  if (a.shape() != b.shape()) throw std::runtime_error("sub: shapes differ");
  if (b.is_zero()) return a;
  if (a.node().kind == ExprKind::Constant && b.node().kind == ExprKind::Constant) {
    if (a.shape() == 0)
      return FormExpr::constant(a.node().scalar_value - b.node().scalar_value);
    return FormExpr::constant_vector(a.node().vector_value - b.node().vector_value);
  }
  return FormExpr(make_node(ExprKind::Sub, a.shape(), {a.ptr(), b.ptr()}));
}

FormExpr operator-(const FormExpr& a) { return -1.0 * a; }

FormExpr operator*(const FormExpr& a, const FormExpr& b) {
  if (a.shape() != 0 && b.shape() != 0)
    throw std::runtime_error("mul: one operand must be scalar");
  if (a.is_zero() || b.is_zero()) return zero(std::max(a.shape(), b.shape()));
  if (node_is_one(a.node())) return b;
  if (node_is_one(b.node())) return a;
  if (a.node().kind == ExprKind::Constant && b.node().kind == ExprKind::Constant) {
    if (b.shape() == 1)
      return FormExpr::constant_vector(a.node().scalar_value * b.node().vector_value);
    if (a.shape() == 1)
      return FormExpr::constant_vector(b.node().scalar_value * a.node().vector_value);
    return FormExpr::constant(a.node().scalar_value * b.node().scalar_value);
  }
  return FormExpr(make_node(ExprKind::Mul, std::max(a.shape(), b.shape()),
                            {a.ptr(), b.ptr()}));
}

FormExpr operator*(double a, const FormExpr& b) {
  return FormExpr::constant(a) * b;
}

Form::Form(std::vector<FormTerm> terms) {
  for (auto& t : terms) {
    if (!t.integrand.valid() || t.integrand.is_zero()) continue;
    if (t.integrand.shape() != 0)
      throw std::runtime_error("form: integrand must be scalar");
    if (test_multiplicity(t.integrand.node()) > 1)
      throw std::runtime_error("form: nonlinear in test function");
    find_arguments(t.integrand.node(), has_test_, has_trial_, test_space_,
                   trial_space_);
    terms_.push_back(std::move(t));
  }
  arity_ = (has_test_ ? 1 : 0) + (has_trial_ ? 1 : 0);
}

Form Form::operator+(const Form& other) const {
  std::vector<FormTerm> terms = terms_;
  terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
  return Form(std::move(terms));
}

Form Form::operator-() const {
  std::vector<FormTerm> terms;
  for (const auto& t : terms_)
    terms.push_back({-1.0 * t.integrand, t.measure});
  return Form(std::move(terms));
}

Form operator*(const FormExpr& integrand, const Measure& measure) {
  return Form({{integrand, measure}});
}

namespace {

FormExpr diff(const FormExpr& e, const FEFunction* u, const FormExpr& direction) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case ExprKind::Coefficient:
      return n.coefficient.get() == u ? direction : zero(0);
    case ExprKind::Test:
    case ExprKind::Trial:
    case ExprKind::Constant:
    case ExprKind::SpatialCoordinate:
    case ExprKind::FacetNormal:
    case ExprKind::ScalarFunction:
      return zero(n.shape);
    case ExprKind::Grad: {
      FormExpr d = diff(FormExpr(n.children[0]), u, direction);
      return d.is_zero() ? zero(1) : grad(d);
    }
    case ExprKind::Div: {
      FormExpr d = diff(FormExpr(n.children[0]), u, direction);
      return d.is_zero() ? zero(0) : div(d);
    }
    case ExprKind::Add:
      return diff(FormExpr(n.children[0]), u, direction) +
             diff(FormExpr(n.children[1]), u, direction);
    case ExprKind::Sub:
      return diff(FormExpr(n.children[0]), u, direction) -
             diff(FormExpr(n.children[1]), u, direction);
    case ExprKind::Mul: {
      FormExpr a(n.children[0]), b(n.children[1]);
      return diff(a, u, direction) * b + a * diff(b, u, direction);
    }
    case ExprKind::Inner: {
      FormExpr a(n.children[0]), b(n.children[1]);
      return inner(diff(a, u, direction), b) + inner(a, diff(b, u, direction));
    }
    case ExprKind::Power: {
      FormExpr base(n.children[0]);
      FormExpr d = diff(base, u, direction);
      if (d.is_zero()) return zero(0);
      return static_cast<double>(n.exponent) * pow(base, n.exponent - 1) * d;
    }
  }
  throw std::runtime_error("derivative: unsupported node kind");
}

FormExpr rewrite(const FormExpr& e,
                 const std::function<FormExpr(const ExprNode&)>& leaf) {
  const ExprNode& n = e.node();
  if (n.children.empty()) return leaf(n);
  std::vector<ExprPtr> children;
  children.reserve(n.children.size());
  for (const auto& c : n.children)
    children.push_back(rewrite(FormExpr(c), leaf).ptr());
  auto node = std::make_shared<ExprNode>(n);
  node->children = std::move(children);
  return FormExpr(node);
}

}  // namespace

Form derivative(const Form& F, const std::shared_ptr<FEFunction>& u) {
  FormExpr direction = F.has_test() ? FormExpr::trial(u->space_ptr())
                                    : FormExpr::test(u->space_ptr());
  std::vector<FormTerm> terms;
  for (const auto& t : F.terms()) {
    FormExpr d = diff(t.integrand, u.get(), direction);
    if (!d.is_zero()) terms.push_back({d, t.measure});
  }
  return Form(std::move(terms));
}

Form adjoint(const Form& a) {
  if (a.arity() != 2) throw std::runtime_error("adjoint: bilinear form required");
  auto swap_roles = [](const ExprNode& n) -> FormExpr {
    if (n.kind == ExprKind::Test) return FormExpr::trial(n.space);
    if (n.kind == ExprKind::Trial) return FormExpr::test(n.space);
    return FormExpr(std::make_shared<ExprNode>(n));
  };
  std::vector<FormTerm> terms;
  for (const auto& t : a.terms())
    terms.push_back({rewrite(t.integrand, swap_roles), t.measure});
  return Form(std::move(terms));
}

Form residual_form(const Form& F) {
  if (F.arity() != 1)
    throw std::runtime_error("residual_form: linear-in-test form required");
  return -F;
}

Form replace_trial(const Form& a, const std::shared_ptr<FEFunction>& u_h) {
  if (!a.has_trial()) throw std::runtime_error("replace_trial: no trial function");
  if (a.trial_space().get() != u_h->space_ptr().get())
    throw std::runtime_error("replace_trial: space mismatch");
  auto subst = [&](const ExprNode& n) -> FormExpr {
    if (n.kind == ExprKind::Trial) return FormExpr::coefficient(u_h);
    return FormExpr(std::make_shared<ExprNode>(n));
  };
  std::vector<FormTerm> terms;
  for (const auto& t : a.terms())
    terms.push_back({rewrite(t.integrand, subst), t.measure});
  return Form(std::move(terms));
}

Form residual_form(const Form& a, const Form& L,
                   const std::shared_ptr<FEFunction>& u_h) {
  return L + (-replace_trial(a, u_h));
}

int degree_estimate(const FormExpr& e, int test_degree_override) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case ExprKind::Test:
      return test_degree_override >= 0 ? test_degree_override
                                       : n.space->degree();
    case ExprKind::Trial:
      return n.space->degree();
    case ExprKind::Coefficient:
      return n.coefficient->space().degree();
    case ExprKind::ScalarFunction:
      return n.degree_hint;
    case ExprKind::SpatialCoordinate:
      return 1;
    case ExprKind::Constant:
    case ExprKind::FacetNormal:
      return 0;
    case ExprKind::Grad:
    case ExprKind::Div:
      return std::max(
          degree_estimate(FormExpr(n.children[0]), test_degree_override) - 1, 0);
    case ExprKind::Add:
    case ExprKind::Sub:
      return std::max(
          degree_estimate(FormExpr(n.children[0]), test_degree_override),
          degree_estimate(FormExpr(n.children[1]), test_degree_override));
    case ExprKind::Mul:
    case ExprKind::Inner:
      return degree_estimate(FormExpr(n.children[0]), test_degree_override) +
             degree_estimate(FormExpr(n.children[1]), test_degree_override);
    case ExprKind::Power:
      return n.exponent *
             degree_estimate(FormExpr(n.children[0]), test_degree_override);
  }
  return 0;
}

void collect_coefficients(const FormExpr& e,
                          std::vector<std::shared_ptr<FEFunction>>& out) {
  const ExprNode& n = e.node();
  if (n.kind == ExprKind::Coefficient) {
    if (std::find(out.begin(), out.end(), n.coefficient) == out.end())
      out.push_back(n.coefficient);
  }
  for (const auto& c : n.children) collect_coefficients(FormExpr(c), out);
}

}  // namespace goalfem
