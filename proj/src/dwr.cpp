#include "goalfem/dwr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "goalfem/quadrature.hpp"

namespace goalfem {

namespace {

Vec2 ref_point(const Eigen::Vector3d& lam) { return {lam[1], lam[2]}; }

Eigen::Vector3d edge_lambda(int e, double t) {
  Eigen::Vector3d lam = Eigen::Vector3d::Zero();
  lam[(e + 1) % 3] = 1.0 - t;
  lam[(e + 2) % 3] = t;
  return lam;
}

/// 1D Lagrange basis on the equispaced nodes t_k = k/q of [0,1].
double lagrange1(int q, int j, double t) {
  double tj = static_cast<double>(j) / q;
  double out = 1.0;
  for (int k = 0; k <= q; ++k) {
    if (k == j) continue;
    double tk = static_cast<double>(k) / q;
    out *= (t - tk) / (tj - tk);
  }
  return out;
}

}  // namespace

LocalTestField bubble_field(const CellGeometry& geom) {
  LocalTestField f;
  f.value = [](const Eigen::Vector3d& lam) { return lam[0] * lam[1] * lam[2]; };
  f.gradient = [geom](const Eigen::Vector3d& lam) {
    Vec2 g = Vec2::Zero();
    for (int i = 0; i < 3; ++i)
      g += geom.grad_lambda(i) * lam[(i + 1) % 3] * lam[(i + 2) % 3];
    return g;
  };
  return f;
}

LocalTestField cone_field(const CellGeometry& geom, int local_edge) {
  const int a = (local_edge + 1) % 3;
  const int b = (local_edge + 2) % 3;
  LocalTestField f;
  f.value = [a, b](const Eigen::Vector3d& lam) { return lam[a] * lam[b]; };
  f.gradient = [geom, a, b](const Eigen::Vector3d& lam) {
    return Vec2(geom.grad_lambda(a) * lam[b] + geom.grad_lambda(b) * lam[a]);
  };
  return f;
}

double ResidualRep::cell_value(int c, const Eigen::Vector3d& lam) const {
  const ReferenceElement& elem = ReferenceElement::get(degree);
  Eigen::VectorXd basis = elem.eval(ref_point(lam));
  return cell[c].dot(basis);
}

double ResidualRep::facet_value(int c, int e, double t) const {
  const Eigen::VectorXd& vals = facet[c][e];
  double out = 0.0;
  for (int j = 0; j <= degree; ++j) out += vals[j] * lagrange1(degree, j, t);
  return out;
}

ResidualRep localize(const Form& r) {
  if (r.arity() != 1 || !r.has_test())
    throw std::runtime_error("localize: linear residual form required");
  const FunctionSpace& V = *r.test_space();
  const Mesh& mesh = V.mesh();
  const int p = V.degree();
  const int q = p;
  const ReferenceElement& elem = V.element();
  const int n = elem.dim();

  // Bubble-weighted reference mass matrix: M(T) = 2|T| * M_ref.
  QuadratureRule cell_rule = triangle_rule(2 * p + 3);
  Eigen::MatrixXd mass_ref = Eigen::MatrixXd::Zero(n, n);
  for (int qp = 0; qp < cell_rule.size(); ++qp) {
    Vec2 ref(cell_rule.points(qp, 0), cell_rule.points(qp, 1));
    Eigen::VectorXd phi = elem.eval(ref);
    double b = (1.0 - ref.x() - ref.y()) * ref.x() * ref.y();
    mass_ref += cell_rule.weights[qp] * b * phi * phi.transpose();
  }
  Eigen::LDLT<Eigen::MatrixXd> mass_ldlt(mass_ref);
  if (mass_ldlt.info() != Eigen::Success || !mass_ldlt.isPositive())
    throw std::runtime_error("localize: singular bubble mass matrix "
                             "(degenerate geometry)");

  // Cone-weighted reference Gram on the edge: G(S) = |S| * G_ref,
  // G_ref(i, j) = int_0^1 l_j(t) t(1-t) t^i dt.
  LineQuadratureRule edge_rule = line_rule(2 * q + 2);
  Eigen::MatrixXd gram_ref = Eigen::MatrixXd::Zero(q + 1, q + 1);
  for (int qp = 0; qp < edge_rule.size(); ++qp) {
    double t = edge_rule.points[qp];
    double w = edge_rule.weights[qp] * t * (1.0 - t);
    for (int i = 0; i <= q; ++i)
      for (int j = 0; j <= q; ++j)
        gram_ref(i, j) += w * std::pow(t, i) * lagrange1(q, j, t);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> gram_lu(gram_ref);

  // Volume pairing rule for <R_T, cone tests>_T.
  QuadratureRule pair_rule = triangle_rule(p + q + 2);

  ResidualRep rep;
  rep.degree = p;
  rep.mesh = V.mesh_ptr();
  rep.cell.resize(mesh.num_cells());
  rep.facet.resize(mesh.num_cells());

  for (int c = 0; c < mesh.num_cells(); ++c) {
    CellGeometry geom = mesh.cell_geometry(c);
    LocalTestField bub = bubble_field(geom);

    std::vector<LocalTestField> cell_tests(n);
    for (int i = 0; i < n; ++i) {
      cell_tests[i].value = [&elem, bub, i](const Eigen::Vector3d& lam) {
        return bub.value(lam) * elem.eval(ref_point(lam))[i];
      };
      cell_tests[i].gradient = [&elem, bub, geom, i](const Eigen::Vector3d& lam) {
        Vec2 ref = ref_point(lam);
        double phi = elem.eval(ref)[i];
        Vec2 gphi = geom.jac_inv.transpose() *
                    elem.eval_grad(ref).row(i).transpose();
        return Vec2(bub.gradient(lam) * phi + bub.value(lam) * gphi);
      };
    }
    Eigen::VectorXd rhs = apply_local_tests(r, c, cell_tests, p + 3, false);
    rep.cell[c] = mass_ldlt.solve(rhs / (2.0 * geom.area));

    for (int e = 0; e < 3; ++e) {
      const int a = (e + 1) % 3;
      const int b = (e + 2) % 3;
      std::vector<LocalTestField> cone_tests(q + 1);
      for (int i = 0; i <= q; ++i) {
        cone_tests[i].value = [a, b, i](const Eigen::Vector3d& lam) {
          return lam[a] * std::pow(lam[b], i + 1);
        };
        cone_tests[i].gradient = [geom, a, b, i](const Eigen::Vector3d& lam) {
          return Vec2(geom.grad_lambda(a) * std::pow(lam[b], i + 1) +
                      (i + 1) * lam[a] * std::pow(lam[b], i) *
                          geom.grad_lambda(b));
        };
      }
      Eigen::VectorXd frhs =
          apply_local_tests(r, c, cone_tests, q + 2, true, e);
      // Subtract the volume pairing <R_T, beta_S lambda_b^i>_T.
      for (int i = 0; i <= q; ++i) {
        double vol = 0.0;
        for (int qp = 0; qp < pair_rule.size(); ++qp) {
          Vec2 ref(pair_rule.points(qp, 0), pair_rule.points(qp, 1));
          Eigen::Vector3d lam(1.0 - ref.x() - ref.y(), ref.x(), ref.y());
          vol += pair_rule.weights[qp] * rep.cell[c].dot(elem.eval(ref)) *
                 cone_tests[i].value(lam);
        }
        frhs[i] -= 2.0 * geom.area * vol;
      }
      rep.facet[c][e] =
          gram_lu.solve(frhs / geom.edge_length[e]);
    }
  }
  return rep;
}

Eigen::VectorXd apply_residual_rep(const ResidualRep& rep,
                                   const FunctionSpace& W) {
  const Mesh& mesh = *rep.mesh;
  if (&mesh != &W.mesh())
    throw std::runtime_error("apply_residual_rep: mesh mismatch");
  const int p = rep.degree;
  const ReferenceElement& welem = W.element();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(W.dim());

  QuadratureRule cell_rule = triangle_rule(p + W.degree());
  LineQuadratureRule edge_rule = line_rule(p + W.degree());
  const ReferenceElement& relem = ReferenceElement::get(p);

  for (int c = 0; c < mesh.num_cells(); ++c) {
    CellGeometry geom = mesh.cell_geometry(c);
    const auto& dofs = W.cell_dofs(c);
    for (int qp = 0; qp < cell_rule.size(); ++qp) {
      Vec2 ref(cell_rule.points(qp, 0), cell_rule.points(qp, 1));
      double rt = rep.cell[c].dot(relem.eval(ref));
      Eigen::VectorXd phi = welem.eval(ref);
      double w = cell_rule.weights[qp] * 2.0 * geom.area * rt;
      for (int i = 0; i < phi.size(); ++i) out[dofs[i]] += w * phi[i];
    }
    for (int e = 0; e < 3; ++e) {
      // Each cell contributes its own one-sided facet residual; summing the
      // two sides of an interior facet recovers the flux jump.
      double len = geom.edge_length[e];
      for (int qp = 0; qp < edge_rule.size(); ++qp) {
        double t = edge_rule.points[qp];
        Eigen::Vector3d lam = edge_lambda(e, t);
        double rs = rep.facet_value(c, e, t);
        Eigen::VectorXd phi = welem.eval(ref_point(lam));
        double w = edge_rule.weights[qp] * len * rs;
        for (int i = 0; i < phi.size(); ++i) out[dofs[i]] += w * phi[i];
      }
    }
  }
  return out;
}

double estimate(const Form& r, const FEFunction& Ez) {
  return std::abs(apply_functional(r, Ez));
}

Indicators indicators(const ResidualRep& rep, const FEFunction& Ez,
                      const FEFunction& piEz) {
  const Mesh& mesh = *rep.mesh;
  if (&mesh != &Ez.space().mesh() || &mesh != &piEz.space().mesh())
    throw std::runtime_error("indicators: mesh mismatch");
  const int p = rep.degree;
  const int pw = Ez.space().degree();
  const ReferenceElement& relem = ReferenceElement::get(p);
  const ReferenceElement& eelem = Ez.space().element();
  const ReferenceElement& pelem = piEz.space().element();

  QuadratureRule cell_rule = triangle_rule(p + pw);
  LineQuadratureRule edge_rule = line_rule(p + pw);

  Indicators ind;
  ind.eta.resize(mesh.num_cells());
  ind.signed_contribution.resize(mesh.num_cells());

  for (int c = 0; c < mesh.num_cells(); ++c) {
    CellGeometry geom = mesh.cell_geometry(c);
    double contrib = 0.0;
    for (int qp = 0; qp < cell_rule.size(); ++qp) {
      Vec2 ref(cell_rule.points(qp, 0), cell_rule.points(qp, 1));
      double d = Ez.value_from_tables(c, eelem.eval(ref)) -
                 piEz.value_from_tables(c, pelem.eval(ref));
      contrib += cell_rule.weights[qp] * 2.0 * geom.area *
                 rep.cell[c].dot(relem.eval(ref)) * d;
    }
    for (int e = 0; e < 3; ++e) {
      // Averaged facet residual {R_dT}: half of each side's one-sided
      // residual on interior facets, so the cell sums preserve the total.
      int fid = mesh.cell_facet(c, e);
      int c2 = -1, e2 = -1;
      bool flip = false;
      if (!mesh.facet_on_boundary(fid)) {
        for (const auto& use : mesh.facet_cells(fid))
          if (use.cell != c) {
            c2 = use.cell;
            e2 = use.local_edge;
          }
        flip = mesh.cell(c)[(e + 1) % 3] != mesh.cell(c2)[(e2 + 1) % 3];
      }
      double len = geom.edge_length[e];
      double facet_sum = 0.0;
      for (int qp = 0; qp < edge_rule.size(); ++qp) {
        double t = edge_rule.points[qp];
        Vec2 ref = ref_point(edge_lambda(e, t));
        double d = Ez.value_from_tables(c, eelem.eval(ref)) -
                   piEz.value_from_tables(c, pelem.eval(ref));
        double rs = rep.facet_value(c, e, t);
        if (c2 >= 0)
          rs = 0.5 * (rs + rep.facet_value(c2, e2, flip ? 1.0 - t : t));
        facet_sum += edge_rule.weights[qp] * rs * d;
      }
      contrib += len * facet_sum;
    }
    ind.signed_contribution[c] = contrib;
    ind.eta[c] = std::abs(contrib);
    ind.signed_sum += contrib;
  }
  ind.eta_h = std::abs(ind.signed_sum);
  return ind;
}

void Indicators::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("Indicators: cannot open " + path);
  out << "cell_id,eta_T,signed_contribution\n";
  out.precision(17);
  for (int c = 0; c < eta.size(); ++c)
    out << c << ',' << eta[c] << ',' << signed_contribution[c] << '\n';
}

namespace {

struct PatchFit {
  bool ok = false;
  Eigen::VectorXd coeffs;  // monomial coefficients in scaled coordinates
  Vec2 center = Vec2::Zero();
  Vec2 halfwidth = Vec2::Ones();
};

std::vector<std::pair<int, int>> monomials_up_to(int degree) {
  std::vector<std::pair<int, int>> mono;
  for (int total = 0; total <= degree; ++total)
    for (int a = total; a >= 0; --a) mono.emplace_back(a, total - a);
  return mono;
}

double eval_monomials(const std::vector<std::pair<int, int>>& mono,
                      const Eigen::VectorXd& coeffs, const Vec2& xhat) {
  double out = 0.0;
  for (size_t j = 0; j < mono.size(); ++j)
    out += coeffs[j] * std::pow(xhat.x(), mono[j].first) *
           std::pow(xhat.y(), mono[j].second);
  return out;
}

PatchFit fit_patch(const FEFunction& v, const std::vector<int>& dofs,
                   const std::vector<std::pair<int, int>>& mono) {
  const int n = static_cast<int>(mono.size());
  const int m = static_cast<int>(dofs.size());
  PatchFit fit;
  if (m < n) return fit;

  Vec2 lo = v.space().dof_coordinate(dofs[0]);
  Vec2 hi = lo;
  for (int d : dofs) {
    lo = lo.cwiseMin(v.space().dof_coordinate(d));
    hi = hi.cwiseMax(v.space().dof_coordinate(d));
  }
  fit.center = 0.5 * (lo + hi);
  fit.halfwidth = (0.5 * (hi - lo)).cwiseMax(1e-14);

  Eigen::MatrixXd A(m, n);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    Vec2 xhat = (v.space().dof_coordinate(dofs[i]) - fit.center)
                    .cwiseQuotient(fit.halfwidth);
    for (int j = 0; j < n; ++j)
      A(i, j) = std::pow(xhat.x(), mono[j].first) *
                std::pow(xhat.y(), mono[j].second);
    b[i] = v.coeffs[dofs[i]];
  }

  // Column-scaled normal equations; orthogonal factorization on
  // ill-conditioning or rank deficiency.
  Eigen::MatrixXd N = A.transpose() * A;
  Eigen::VectorXd scale(n);
  for (int j = 0; j < n; ++j) scale[j] = std::sqrt(std::max(N(j, j), 1e-300));
  Eigen::MatrixXd Ns =
      scale.cwiseInverse().asDiagonal() * N * scale.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Ns);
  double emin = eig.eigenvalues().minCoeff();
  double emax = eig.eigenvalues().maxCoeff();
  if (emin > 0.0 && emax / emin < 1e8) {
    Eigen::VectorXd rhs = scale.cwiseInverse().asDiagonal() * (A.transpose() * b);
    fit.coeffs = scale.cwiseInverse().asDiagonal() *
                 Eigen::LLT<Eigen::MatrixXd>(Ns).solve(rhs);
    fit.ok = true;
    return fit;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < n) return fit;
  fit.coeffs = qr.solve(b);
  fit.ok = true;
  return fit;
}

}  // namespace

FEFunction extrapolate(const FEFunction& v,
                       std::shared_ptr<const FunctionSpace> W) {
  const FunctionSpace& V = v.space();
  const Mesh& mesh = V.mesh();
  if (&mesh != &W->mesh())
    throw std::runtime_error("extrapolate: spaces live on different meshes");
  if (W->degree() != V.degree() + 1)
    throw std::runtime_error("extrapolate: target degree must be p+1");

  const auto mono = monomials_up_to(W->degree());
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(W->dim());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(W->dim());

  for (int c = 0; c < mesh.num_cells(); ++c) {
    // Vertex patch: all cells sharing a vertex with c; grown by one more
    // ring when the fit is underdetermined.
    std::set<int> patch;
    for (int lv = 0; lv < 3; ++lv)
      for (int pc : mesh.cells_around_vertex(mesh.cell(c)[lv]))
        patch.insert(pc);

    PatchFit fit;
    for (int attempt = 0; attempt < 2; ++attempt) {
      std::set<int> dofset;
      for (int pc : patch)
        for (int d : V.cell_dofs(pc)) dofset.insert(d);
      std::vector<int> dofs(dofset.begin(), dofset.end());
      fit = fit_patch(v, dofs, mono);
      if (fit.ok) break;
      std::set<int> grown = patch;
      for (int pc : patch)
        for (int lv = 0; lv < 3; ++lv)
          for (int nc : mesh.cells_around_vertex(mesh.cell(pc)[lv]))
            grown.insert(nc);
      patch.swap(grown);
    }
    if (!fit.ok)
      throw std::runtime_error("extrapolate: rank-deficient patch around cell " +
                               std::to_string(c));

    for (int d : W->cell_dofs(c)) {
      Vec2 xhat =
          (W->dof_coordinate(d) - fit.center).cwiseQuotient(fit.halfwidth);
      sums[d] += eval_monomials(mono, fit.coeffs, xhat);
      counts[d] += 1.0;
    }
  }

  FEFunction out(W);
  out.coeffs = sums.cwiseQuotient(counts);
  return out;
}

std::vector<int> mark_dorfler(const Eigen::VectorXd& eta, double alpha) {
  const int n = static_cast<int>(eta.size());
  double total = eta.sum();
  if (total <= 0.0) return {};
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (eta[a] != eta[b]) return eta[a] > eta[b];
    return a < b;
  });
  std::vector<int> marked;
  double cum = 0.0;
  for (int id : order) {
    // Zero-indicator cells can never be needed; stopping here also guards
    // against alpha = 1 spilling over on rounding of the running sum.
    if (eta[id] <= 0.0) break;
    marked.push_back(id);
    cum += eta[id];
    if (cum >= alpha * total) break;
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

}  // namespace goalfem
