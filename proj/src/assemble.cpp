#include "goalfem/assemble.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "goalfem/quadrature.hpp"

namespace goalfem {

namespace {

constexpr int kQuadratureCap = 8;

struct Value {
  int shape = 0;
  double s = 0.0;
  Vec2 v = Vec2::Zero();
};

struct CoeffValue {
  const FEFunction* f;
  double value;
  Vec2 grad;
};

struct EvalContext {
  Vec2 x = Vec2::Zero();
  Vec2 normal = Vec2::Zero();
  bool on_facet = false;
  double test_val = 0.0;
  Vec2 test_grad = Vec2::Zero();
  double trial_val = 0.0;
  Vec2 trial_grad = Vec2::Zero();
  const std::vector<CoeffValue>* coeffs = nullptr;

  const CoeffValue& coeff(const FEFunction* f) const {
    for (const auto& c : *coeffs)
      if (c.f == f) return c;
    throw std::runtime_error("assemble: coefficient not bound in context");
  }
};

Value eval(const ExprNode& n, const EvalContext& ctx);
Vec2 eval_grad(const ExprNode& n, const EvalContext& ctx);
double eval_div(const ExprNode& n, const EvalContext& ctx);

Value eval(const ExprNode& n, const EvalContext& ctx) {
  Value out;
  out.shape = n.shape;
  switch (n.kind) {
    case ExprKind::Test:
      out.s = ctx.test_val;
      return out;
    case ExprKind::Trial:
      out.s = ctx.trial_val;
      return out;
    case ExprKind::Coefficient:
      out.s = ctx.coeff(n.coefficient.get()).value;
      return out;
    case ExprKind::ScalarFunction:
      out.s = n.callable(ctx.x);
      return out;
    case ExprKind::SpatialCoordinate:
      out.v = ctx.x;
      return out;
    case ExprKind::FacetNormal:
      if (!ctx.on_facet)
        throw std::runtime_error("assemble: facet normal in a cell integral");
      out.v = ctx.normal;
      return out;
    case ExprKind::Constant:
      out.s = n.scalar_value;
      out.v = n.vector_value;
      return out;
    case ExprKind::Grad:
      out.v = eval_grad(*n.children[0], ctx);
      return out;
    case ExprKind::Div:
      out.s = eval_div(*n.children[0], ctx);
      return out;
    case ExprKind::Inner: {
      Value a = eval(*n.children[0], ctx);
      Value b = eval(*n.children[1], ctx);
      out.s = a.v.dot(b.v);
      return out;
    }
    case ExprKind::Add: {
      Value a = eval(*n.children[0], ctx);
      Value b = eval(*n.children[1], ctx);
      out.s = a.s + b.s;
      out.v = a.v + b.v;
      return out;
    }
    case ExprKind::Sub: {
      Value a = eval(*n.children[0], ctx);
      Value b = eval(*n.children[1], ctx);
      out.s = a.s - b.s;
      out.v = a.v - b.v;
      return out;
    }
    case ExprKind::Mul: {
      Value a = eval(*n.children[0], ctx);
      Value b = eval(*n.children[1], ctx);
      if (a.shape == 0 && b.shape == 0) {
        out.s = a.s * b.s;
      } else if (a.shape == 0) {
        out.v = a.s * b.v;
      } else {
        out.v = b.s * a.v;
      }
      return out;
    }
    case ExprKind::Power: {
      Value a = eval(*n.children[0], ctx);
      out.s = std::pow(a.s, n.exponent);
      return out;
    }
  }
  throw std::runtime_error("assemble: unsupported expression node");
}

Vec2 eval_grad(const ExprNode& n, const EvalContext& ctx) {
  switch (n.kind) {
    case ExprKind::Test:
      return ctx.test_grad;
    case ExprKind::Trial:
      return ctx.trial_grad;
    case ExprKind::Coefficient:
      return ctx.coeff(n.coefficient.get()).grad;
    case ExprKind::Constant:
      return Vec2::Zero();
    case ExprKind::Add:
      return eval_grad(*n.children[0], ctx) + eval_grad(*n.children[1], ctx);
    case ExprKind::Sub:
      return eval_grad(*n.children[0], ctx) - eval_grad(*n.children[1], ctx);
    case ExprKind::Mul: {
      const ExprNode& a = *n.children[0];
      const ExprNode& b = *n.children[1];
      if (a.shape != 0 || b.shape != 0)
        throw std::runtime_error("assemble: gradient of a vector expression");
      return eval_grad(a, ctx) * eval(b, ctx).s + eval(a, ctx).s * eval_grad(b, ctx);
    }
    case ExprKind::Power: {
      const ExprNode& base = *n.children[0];
      double bs = eval(base, ctx).s;
      return n.exponent * std::pow(bs, n.exponent - 1) * eval_grad(base, ctx);
    }
    case ExprKind::ScalarFunction:
      throw std::runtime_error("assemble: gradient of pointwise data is not available");
    default:
      throw std::runtime_error("assemble: unsupported gradient operand");
  }
}

double eval_div(const ExprNode& n, const EvalContext& ctx) {
  switch (n.kind) {
    case ExprKind::Constant:
      return 0.0;
    case ExprKind::SpatialCoordinate:
      return 2.0;
    case ExprKind::Add:
      return eval_div(*n.children[0], ctx) + eval_div(*n.children[1], ctx);
    case ExprKind::Sub:
      return eval_div(*n.children[0], ctx) - eval_div(*n.children[1], ctx);
    case ExprKind::Mul: {
      const ExprNode& a = *n.children[0];
      const ExprNode& b = *n.children[1];
      const ExprNode& scalar = a.shape == 0 ? a : b;
      const ExprNode& vec = a.shape == 0 ? b : a;
      return eval_grad(scalar, ctx).dot(eval(vec, ctx).v) +
             eval(scalar, ctx).s * eval_div(vec, ctx);
    }
    default:
      throw std::runtime_error("assemble: unsupported divergence operand");
  }
}

struct RefTables {
  std::vector<Eigen::VectorXd> values;     // per quadrature point
  std::vector<Eigen::MatrixXd> ref_grads;  // per quadrature point
};

RefTables build_tables(const ReferenceElement& elem, const QuadratureRule& rule) {
  RefTables t;
  t.values.reserve(rule.size());
  t.ref_grads.reserve(rule.size());
  for (int q = 0; q < rule.size(); ++q) {
    Vec2 p(rule.points(q, 0), rule.points(q, 1));
    t.values.push_back(elem.eval(p));
    t.ref_grads.push_back(elem.eval_grad(p));
  }
  return t;
}

std::vector<std::shared_ptr<FEFunction>> term_coefficients(const FormTerm& term) {
  std::vector<std::shared_ptr<FEFunction>> coeffs;
  collect_coefficients(term.integrand, coeffs);
  return coeffs;
}

int term_quadrature_degree(const FormTerm& term, int test_override = -1) {
  return std::min(degree_estimate(term.integrand, test_override), kQuadratureCap);
}

// Barycentric coordinates of the quadrature points of an edge rule on local
// edge e: lambda[e] = 0, lambda[(e+1)%3] = 1 - t, lambda[(e+2)%3] = t.
Eigen::Vector3d edge_barycentric(int e, double t) {
  Eigen::Vector3d lam = Eigen::Vector3d::Zero();
  lam[(e + 1) % 3] = 1.0 - t;
  lam[(e + 2) % 3] = t;
  return lam;
}

Vec2 bary_to_ref(const Eigen::Vector3d& lam) { return {lam[1], lam[2]}; }

// Generic assembly kernel parameterized over how the test and trial slots
// are filled; calls emit(i, j, value) per local pair (j = 0 when no trial).
template <typename Emit>
void assemble_term(const FormTerm& term, const Mesh& mesh,
                   const FunctionSpace* test_space,
                   const FunctionSpace* trial_space, const Emit& emit) {
  const int deg = term_quadrature_degree(term);
  const auto coeffs = term_coefficients(term);
  const int n_test = test_space ? test_space->local_dim() : 1;
  const int n_trial = trial_space ? trial_space->local_dim() : 1;

  if (term.measure.kind == MeasureKind::Cell) {
    QuadratureRule rule = triangle_rule(deg);
    RefTables test_tab, trial_tab;
    if (test_space) test_tab = build_tables(test_space->element(), rule);
    if (trial_space) trial_tab = build_tables(trial_space->element(), rule);
    std::vector<RefTables> coeff_tabs;
    for (const auto& c : coeffs)
      coeff_tabs.push_back(build_tables(c->space().element(), rule));

    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
      CellGeometry geom = mesh.cell_geometry(cell);
      double detj = 2.0 * geom.area;
      for (int q = 0; q < rule.size(); ++q) {
        EvalContext ctx;
        ctx.x = geom.to_physical(Vec2(rule.points(q, 0), rule.points(q, 1)));
        std::vector<CoeffValue> cvals;
        for (size_t k = 0; k < coeffs.size(); ++k) {
          cvals.push_back({coeffs[k].get(),
                           coeffs[k]->value_from_tables(cell, coeff_tabs[k].values[q]),
                           coeffs[k]->grad_from_tables(cell, coeff_tabs[k].ref_grads[q],
                                                       geom.jac_inv)});
        }
        ctx.coeffs = &cvals;
        double w = rule.weights[q] * detj;
        for (int i = 0; i < n_test; ++i) {
          if (test_space) {
            ctx.test_val = test_tab.values[q][i];
            ctx.test_grad =
                geom.jac_inv.transpose() * test_tab.ref_grads[q].row(i).transpose();
          }
          for (int j = 0; j < n_trial; ++j) {
            if (trial_space) {
              ctx.trial_val = trial_tab.values[q][j];
              ctx.trial_grad =
                  geom.jac_inv.transpose() * trial_tab.ref_grads[q].row(j).transpose();
            }
            emit(cell, i, j, w * eval(term.integrand.node(), ctx).s);
          }
        }
      }
    }
    return;
  }

  // Exterior facet measure.
  LineQuadratureRule rule = line_rule(deg);
  for (int f = 0; f < mesh.num_facets(); ++f) {
    if (!mesh.facet_on_boundary(f) || mesh.facet_marker(f) != term.measure.marker)
      continue;
    const Mesh::FacetUse& use = mesh.facet_cells(f)[0];
    CellGeometry geom = mesh.cell_geometry(use.cell);
    double len = geom.edge_length[use.local_edge];
    for (int q = 0; q < rule.size(); ++q) {
      Eigen::Vector3d lam = edge_barycentric(use.local_edge, rule.points[q]);
      Vec2 ref = bary_to_ref(lam);
      EvalContext ctx;
      ctx.x = geom.to_physical(ref);
      ctx.normal = geom.normal[use.local_edge];
      ctx.on_facet = true;
      std::vector<CoeffValue> cvals;
      for (const auto& c : coeffs) {
        const ReferenceElement& ce = c->space().element();
        cvals.push_back({c.get(), c->value_from_tables(use.cell, ce.eval(ref)),
                         c->grad_from_tables(use.cell, ce.eval_grad(ref),
                                             geom.jac_inv)});
      }
      ctx.coeffs = &cvals;
      double w = rule.weights[q] * len;
      Eigen::VectorXd test_vals, trial_vals;
      Eigen::MatrixXd test_grads, trial_grads;
      if (test_space) {
        test_vals = test_space->element().eval(ref);
        test_grads = test_space->element().eval_grad(ref);
      }
      if (trial_space) {
        trial_vals = trial_space->element().eval(ref);
        trial_grads = trial_space->element().eval_grad(ref);
      }
      for (int i = 0; i < n_test; ++i) {
        if (test_space) {
          ctx.test_val = test_vals[i];
          ctx.test_grad = geom.jac_inv.transpose() * test_grads.row(i).transpose();
        }
        for (int j = 0; j < n_trial; ++j) {
          if (trial_space) {
            ctx.trial_val = trial_vals[j];
            ctx.trial_grad = geom.jac_inv.transpose() * trial_grads.row(j).transpose();
          }
          emit(use.cell, i, j, w * eval(term.integrand.node(), ctx).s);
        }
      }
    }
  }
}

}  // namespace

SparseMatrix assemble_matrix(const Form& a) {
  if (a.arity() != 2)
    throw std::runtime_error("assemble_matrix: bilinear form required");
  const FunctionSpace& Vt = *a.test_space();
  const FunctionSpace& Vu = *a.trial_space();
  if (&Vt.mesh() != &Vu.mesh())
    throw std::runtime_error("assemble_matrix: test/trial mesh mismatch");
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& term : a.terms()) {
    assemble_term(term, Vt.mesh(), &Vt, &Vu,
                  [&](int cell, int i, int j, double v) {
                    triplets.emplace_back(Vt.cell_dofs(cell)[i],
                                          Vu.cell_dofs(cell)[j], v);
                  });
  }
  SparseMatrix A(Vt.dim(), Vu.dim());
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

Eigen::VectorXd assemble_vector(const Form& L) {
  if (L.arity() != 1 || !L.has_test())
    throw std::runtime_error("assemble_vector: linear form in test required");
  const FunctionSpace& Vt = *L.test_space();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(Vt.dim());
  for (const auto& term : L.terms()) {
    assemble_term(term, Vt.mesh(), &Vt, nullptr,
                  [&](int cell, int i, int, double v) {
                    b[Vt.cell_dofs(cell)[i]] += v;
                  });
  }
  return b;
}

double assemble_scalar(const Form& M) {
  if (M.arity() != 0)
    throw std::runtime_error("assemble_scalar: functional required");
  // Mesh comes from any coefficient; fall back over terms.
  const Mesh* mesh = nullptr;
  for (const auto& term : M.terms()) {
    std::vector<std::shared_ptr<FEFunction>> coeffs;
    collect_coefficients(term.integrand, coeffs);
    if (!coeffs.empty()) {
      mesh = &coeffs[0]->space().mesh();
      break;
    }
  }
  if (!mesh)
    throw std::runtime_error("assemble_scalar: no coefficient to infer the mesh");
  return assemble_scalar(M, *mesh);
}

double assemble_scalar(const Form& M, const Mesh& mesh) {
  if (M.arity() != 0)
    throw std::runtime_error("assemble_scalar: functional required");
  double out = 0.0;
  for (const auto& term : M.terms()) {
    assemble_term(term, mesh, nullptr, nullptr,
                  [&](int, int, int, double v) { out += v; });
  }
  return out;
}

double apply_functional(const Form& L, const FEFunction& w) {
  if (L.arity() != 1 || !L.has_test())
    throw std::runtime_error("apply_functional: linear form in test required");
  const Mesh& mesh = L.test_space()->mesh();
  if (&mesh != &w.space().mesh())
    throw std::runtime_error("apply_functional: mesh mismatch");
  const ReferenceElement& welem = w.space().element();
  double out = 0.0;
  for (const auto& term : L.terms()) {
    const int deg = term_quadrature_degree(term, w.space().degree());
    const auto coeffs = term_coefficients(term);
    if (term.measure.kind == MeasureKind::Cell) {
      QuadratureRule rule = triangle_rule(deg);
      RefTables wtab = build_tables(welem, rule);
      std::vector<RefTables> coeff_tabs;
      for (const auto& c : coeffs)
        coeff_tabs.push_back(build_tables(c->space().element(), rule));
      for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        CellGeometry geom = mesh.cell_geometry(cell);
        double detj = 2.0 * geom.area;
        for (int q = 0; q < rule.size(); ++q) {
          EvalContext ctx;
          ctx.x = geom.to_physical(Vec2(rule.points(q, 0), rule.points(q, 1)));
          std::vector<CoeffValue> cvals;
          for (size_t k = 0; k < coeffs.size(); ++k) {
            cvals.push_back(
                {coeffs[k].get(),
                 coeffs[k]->value_from_tables(cell, coeff_tabs[k].values[q]),
                 coeffs[k]->grad_from_tables(cell, coeff_tabs[k].ref_grads[q],
                                             geom.jac_inv)});
          }
          ctx.coeffs = &cvals;
          ctx.test_val = w.value_from_tables(cell, wtab.values[q]);
          ctx.test_grad = w.grad_from_tables(cell, wtab.ref_grads[q], geom.jac_inv);
          out += rule.weights[q] * detj * eval(term.integrand.node(), ctx).s;
        }
      }
    } else {
      LineQuadratureRule rule = line_rule(deg);
      for (int f = 0; f < mesh.num_facets(); ++f) {
        if (!mesh.facet_on_boundary(f) ||
            mesh.facet_marker(f) != term.measure.marker)
          continue;
        const Mesh::FacetUse& use = mesh.facet_cells(f)[0];
        CellGeometry geom = mesh.cell_geometry(use.cell);
        double len = geom.edge_length[use.local_edge];
        for (int q = 0; q < rule.size(); ++q) {
          Eigen::Vector3d lam = edge_barycentric(use.local_edge, rule.points[q]);
          Vec2 ref = bary_to_ref(lam);
          EvalContext ctx;
          ctx.x = geom.to_physical(ref);
          ctx.normal = geom.normal[use.local_edge];
          ctx.on_facet = true;
          std::vector<CoeffValue> cvals;
          for (const auto& c : coeffs) {
            const ReferenceElement& ce = c->space().element();
            cvals.push_back({c.get(), c->value_from_tables(use.cell, ce.eval(ref)),
                             c->grad_from_tables(use.cell, ce.eval_grad(ref),
                                                 geom.jac_inv)});
          }
          ctx.coeffs = &cvals;
          ctx.test_val = w.value_from_tables(use.cell, welem.eval(ref));
          ctx.test_grad =
              w.grad_from_tables(use.cell, welem.eval_grad(ref), geom.jac_inv);
          out += rule.weights[q] * len * eval(term.integrand.node(), ctx).s;
        }
      }
    }
  }
  return out;
}

Eigen::VectorXd apply_local_tests(const Form& r, int cell,
                                  const std::vector<LocalTestField>& tests,
                                  int test_degree, bool include_facet_terms,
                                  int only_local_edge) {
  if (!r.has_test())
    throw std::runtime_error("apply_local_tests: linear form in test required");
  const Mesh& mesh = r.test_space()->mesh();
  CellGeometry geom = mesh.cell_geometry(cell);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(tests.size());

  for (const auto& term : r.terms()) {
    const int deg = term_quadrature_degree(term, test_degree);
    const auto coeffs = term_coefficients(term);
    if (term.measure.kind == MeasureKind::Cell) {
      QuadratureRule rule = triangle_rule(deg);
      std::vector<RefTables> coeff_tabs;
      for (const auto& c : coeffs)
        coeff_tabs.push_back(build_tables(c->space().element(), rule));
      double detj = 2.0 * geom.area;
      for (int q = 0; q < rule.size(); ++q) {
        Vec2 ref(rule.points(q, 0), rule.points(q, 1));
        Eigen::Vector3d lam(1.0 - ref.x() - ref.y(), ref.x(), ref.y());
        EvalContext ctx;
        ctx.x = geom.to_physical(ref);
        std::vector<CoeffValue> cvals;
        for (size_t k = 0; k < coeffs.size(); ++k) {
          cvals.push_back(
              {coeffs[k].get(),
               coeffs[k]->value_from_tables(cell, coeff_tabs[k].values[q]),
               coeffs[k]->grad_from_tables(cell, coeff_tabs[k].ref_grads[q],
                                           geom.jac_inv)});
        }
        ctx.coeffs = &cvals;
        double w = rule.weights[q] * detj;
        for (size_t k = 0; k < tests.size(); ++k) {
          ctx.test_val = tests[k].value(lam);
          ctx.test_grad = tests[k].gradient(lam);
          out[k] += w * eval(term.integrand.node(), ctx).s;
        }
      }
    } else {
      if (!include_facet_terms) continue;
      LineQuadratureRule rule = line_rule(deg);
      for (int e = 0; e < 3; ++e) {
        if (only_local_edge >= 0 && e != only_local_edge) continue;
        int f = mesh.cell_facet(cell, e);
        if (!mesh.facet_on_boundary(f) ||
            mesh.facet_marker(f) != term.measure.marker)
          continue;
        double len = geom.edge_length[e];
        for (int q = 0; q < rule.size(); ++q) {
          Eigen::Vector3d lam = edge_barycentric(e, rule.points[q]);
          EvalContext ctx;
          ctx.x = geom.to_physical(bary_to_ref(lam));
          ctx.normal = geom.normal[e];
          ctx.on_facet = true;
          std::vector<CoeffValue> cvals;
          for (const auto& c : coeffs) {
            const ReferenceElement& ce = c->space().element();
            Vec2 ref = bary_to_ref(lam);
            cvals.push_back({c.get(), c->value_from_tables(cell, ce.eval(ref)),
                             c->grad_from_tables(cell, ce.eval_grad(ref),
                                                 geom.jac_inv)});
          }
          ctx.coeffs = &cvals;
          double w = rule.weights[q] * len;
          for (size_t k = 0; k < tests.size(); ++k) {
            ctx.test_val = tests[k].value(lam);
            ctx.test_grad = tests[k].gradient(lam);
            out[k] += w * eval(term.integrand.node(), ctx).s;
          }
        }
      }
    }
  }
  return out;
}

void apply_constraints(SparseMatrix& A, Eigen::VectorXd& b,
                       const std::vector<std::pair<int, double>>& bcs) {
  if (bcs.empty()) return;
  const int n = static_cast<int>(A.rows());
  std::vector<char> constrained(n, 0);
  std::vector<double> value(n, 0.0);
  for (const auto& [dof, g] : bcs) {
    constrained[dof] = 1;
    value[dof] = g;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(A.nonZeros() + bcs.size());
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      int i = static_cast<int>(it.row());
      int j = static_cast<int>(it.col());
      if (constrained[j] && !constrained[i]) b[i] -= it.value() * value[j];
      if (!constrained[i] && !constrained[j])
        triplets.emplace_back(i, j, it.value());
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!constrained[i]) continue;
    triplets.emplace_back(i, i, 1.0);
    b[i] = value[i];
  }
  SparseMatrix out(A.rows(), A.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  A.swap(out);
}

Eigen::VectorXd solve_linear(const SparseMatrix& A, const Eigen::VectorXd& b,
                             const std::string& label) {
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve_linear: factorization failed for " + label +
                             " system");
  Eigen::VectorXd x = lu.solve(b);
  double scale = std::max(b.norm(), 1e-300);
  if ((A * x - b).norm() > 1e-10 * scale)
    throw std::runtime_error("solve_linear: residual too large for " + label +
                             " system");
  return x;
}

double free_norm(const Eigen::VectorXd& v,
                 const std::vector<std::pair<int, double>>& bcs) {
  Eigen::VectorXd w = v;
  for (const auto& [dof, g] : bcs) w[dof] = 0.0;
  return w.norm();
}

NewtonResult solve_newton(const Form& F, const std::shared_ptr<FEFunction>& u,
                          const std::vector<std::pair<int, double>>& bcs,
                          double tol_rel, int max_iter) {
  for (const auto& [dof, g] : bcs) u->coeffs[dof] = g;
  NewtonResult result;
  double res0 = free_norm(assemble_vector(F), bcs);
  result.residuals.push_back(res0);
  if (res0 == 0.0) return result;
  std::vector<std::pair<int, double>> homogeneous;
  homogeneous.reserve(bcs.size());
  for (const auto& [dof, g] : bcs) homogeneous.emplace_back(dof, 0.0);

  for (int it = 1; it <= max_iter; ++it) {
    SparseMatrix J = assemble_matrix(derivative(F, u));
    Eigen::VectorXd rhs = -assemble_vector(F);
    apply_constraints(J, rhs, homogeneous);
    u->coeffs += solve_linear(J, rhs, "Newton");
    double res = free_norm(assemble_vector(F), bcs);
    result.residuals.push_back(res);
    result.iterations = it;
    if (res <= tol_rel * res0) return result;
  }
  throw NewtonError("solve_newton: no convergence in " +
                        std::to_string(max_iter) + " iterations",
                    result.residuals);
}

void write_matrix(const SparseMatrix& A, std::ostream& out) {
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace goalfem
