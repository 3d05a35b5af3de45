#include "goalfem/space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace goalfem {

ReferenceElement::ReferenceElement(int degree) : degree_(degree) {
  if (degree < 1 || degree > 3)
    throw std::invalid_argument("ReferenceElement: degree must be 1..3");
  const int p = degree;
  const std::array<Vec2, 3> verts = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  for (const Vec2& v : verts) nodes_.push_back(v);
  for (int e = 0; e < 3; ++e) {
    Vec2 a = verts[(e + 1) % 3];
    Vec2 b = verts[(e + 2) % 3];
    for (int k = 1; k < p; ++k)
      nodes_.push_back(a + (static_cast<double>(k) / p) * (b - a));
  }
  if (p == 3) nodes_.push_back(Vec2(1.0 / 3.0, 1.0 / 3.0));

  for (int total = 0; total <= p; ++total)
    for (int a = total; a >= 0; --a) mono_.emplace_back(a, total - a);

  const int n = dim();
  Eigen::MatrixXd vander(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      vander(i, j) = std::pow(nodes_[i].x(), mono_[j].first) *
                     std::pow(nodes_[i].y(), mono_[j].second);
  coeff_ = vander.inverse().transpose();
}

Eigen::VectorXd ReferenceElement::eval(const Vec2& ref) const {
  const int n = dim();
  Eigen::VectorXd m(n);
  for (int j = 0; j < n; ++j)
    m[j] = std::pow(ref.x(), mono_[j].first) * std::pow(ref.y(), mono_[j].second);
  return coeff_ * m;
}

Eigen::MatrixXd ReferenceElement::eval_grad(const Vec2& ref) const {
  const int n = dim();
  Eigen::MatrixXd dm(n, 2);
  for (int j = 0; j < n; ++j) {
    int a = mono_[j].first, b = mono_[j].second;
    dm(j, 0) = a == 0 ? 0.0 : a * std::pow(ref.x(), a - 1) * std::pow(ref.y(), b);
    dm(j, 1) = b == 0 ? 0.0 : b * std::pow(ref.x(), a) * std::pow(ref.y(), b - 1);
  }
  return coeff_ * dm;
}

const ReferenceElement& ReferenceElement::get(int degree) {
  static const ReferenceElement p1(1), p2(2), p3(3);
  switch (degree) {
    case 1: return p1;
    case 2: return p2;
    case 3: return p3;
    default: throw std::invalid_argument("ReferenceElement: degree must be 1..3");
  }
}

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree) {
  const int p = degree;
  const Mesh& m = *mesh_;
  const int nv = m.num_vertices();
  const int nf = m.num_facets();
  const int nc = m.num_cells();
  const int edge_dofs = p - 1;
  const int cell_dofs = (p - 1) * (p - 2) / 2;
  dim_ = nv + nf * edge_dofs + nc * cell_dofs;

  const ReferenceElement& elem = element();
  cell_dofs_.resize(nc);
  dof_coords_.resize(dim_);
  for (int c = 0; c < nc; ++c) {
    std::vector<int>& dofs = cell_dofs_[c];
    dofs.resize(elem.dim());
    const auto& cv = m.cell(c);
    for (int i = 0; i < 3; ++i) dofs[i] = cv[i];
    int l = 3;
    for (int e = 0; e < 3; ++e) {
      int a = cv[(e + 1) % 3];
      int b = cv[(e + 2) % 3];
      int f = m.cell_facet(c, e);
      int base = nv + f * edge_dofs;
      for (int k = 1; k < p; ++k) {
        // Global edge dofs run from the lower-indexed vertex; local node k
        // sits at parameter k/p from a towards b.
        int idx = a < b ? k : p - k;
        dofs[l++] = base + idx - 1;
      }
    }
    for (int k = 0; k < cell_dofs; ++k) dofs[l++] = nv + nf * edge_dofs + c * cell_dofs + k;

    CellGeometry geom = m.cell_geometry(c);
    for (int i = 0; i < elem.dim(); ++i)
      dof_coords_[dofs[i]] = geom.to_physical(elem.node(i));
  }
}

std::vector<int> FunctionSpace::facet_dofs(int f) const {
  const Mesh& m = *mesh_;
  std::vector<int> dofs = {m.facet(f)[0], m.facet(f)[1]};
  int base = m.num_vertices() + f * (degree_ - 1);
  for (int k = 0; k < degree_ - 1; ++k) dofs.push_back(base + k);
  std::sort(dofs.begin(), dofs.end());
  return dofs;
}

std::vector<int> FunctionSpace::boundary_dofs(int marker) const {
  std::vector<int> dofs;
  const Mesh& m = *mesh_;
  for (int f = 0; f < m.num_facets(); ++f) {
    if (!m.facet_on_boundary(f) || m.facet_marker(f) != marker) continue;
    auto fd = facet_dofs(f);
    dofs.insert(dofs.end(), fd.begin(), fd.end());
  }
  std::sort(dofs.begin(), dofs.end());
  dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  return dofs;
}

double FEFunction::evaluate(int cell, const Vec2& x) const {
  CellGeometry geom = space_->mesh().cell_geometry(cell);
  Vec2 ref = geom.to_reference(x);
  Eigen::Vector3d lam(1.0 - ref.x() - ref.y(), ref.x(), ref.y());
  if (lam.minCoeff() < -1e-10)
    throw std::runtime_error("FEFunction::evaluate: point outside cell");
  Eigen::VectorXd basis = space_->element().eval(ref);
  return value_from_tables(cell, basis);
}

Vec2 FEFunction::evaluate_grad(int cell, const Vec2& x) const {
  CellGeometry geom = space_->mesh().cell_geometry(cell);
  Vec2 ref = geom.to_reference(x);
  Eigen::Vector3d lam(1.0 - ref.x() - ref.y(), ref.x(), ref.y());
  if (lam.minCoeff() < -1e-10)
    throw std::runtime_error("FEFunction::evaluate_grad: point outside cell");
  return grad_from_tables(cell, space_->element().eval_grad(ref), geom.jac_inv);
}

double FEFunction::value_from_tables(int cell, const Eigen::VectorXd& basis) const {
  const auto& dofs = space_->cell_dofs(cell);
  double value = 0.0;
  for (int i = 0; i < basis.size(); ++i) value += coeffs[dofs[i]] * basis[i];
  return value;
}

Vec2 FEFunction::grad_from_tables(int cell, const Eigen::MatrixXd& ref_grads,
                                  const Eigen::Matrix2d& jac_inv) const {
  const auto& dofs = space_->cell_dofs(cell);
  Vec2 ref_grad = Vec2::Zero();
  for (int i = 0; i < ref_grads.rows(); ++i)
    ref_grad += coeffs[dofs[i]] * ref_grads.row(i).transpose();
  return jac_inv.transpose() * ref_grad;
}

void FEFunction::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("FEFunction: cannot open " + path);
  out << "dof_index,x,y,value\n";
  out.precision(17);
  for (int i = 0; i < coeffs.size(); ++i) {
    const Vec2& x = space_->dof_coordinate(i);
    out << i << ',' << x.x() << ',' << x.y() << ',' << coeffs[i] << '\n';
  }
}

FEFunction interpolate(const FEFunction& f, std::shared_ptr<const FunctionSpace> V) {
  if (&f.space().mesh() != &V->mesh())
    throw std::runtime_error("interpolate: spaces live on different meshes");
  FEFunction out(V);
  const ReferenceElement& elem = V->element();
  const Mesh& mesh = V->mesh();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    CellGeometry geom = mesh.cell_geometry(c);
    const auto& dofs = V->cell_dofs(c);
    for (int i = 0; i < elem.dim(); ++i) {
      Eigen::VectorXd basis = f.space().element().eval(elem.node(i));
      out.coeffs[dofs[i]] = f.value_from_tables(c, basis);
    }
    (void)geom;
  }
  return out;
}

FEFunction interpolate_from_parent(const FEFunction& f,
                                   std::shared_ptr<const FunctionSpace> V) {
  const Mesh& fine = V->mesh();
  FEFunction out(V);
  const ReferenceElement& elem = V->element();
  for (int c = 0; c < fine.num_cells(); ++c) {
    int pc = fine.parent_cell(c);
    CellGeometry geom = fine.cell_geometry(c);
    const auto& dofs = V->cell_dofs(c);
    for (int i = 0; i < elem.dim(); ++i) {
      Vec2 x = geom.to_physical(elem.node(i));
      out.coeffs[dofs[i]] = f.evaluate(pc, x);
    }
  }
  return out;
}

FEFunction interpolate(const std::function<double(const Vec2&)>& f,
                       std::shared_ptr<const FunctionSpace> V) {
  FEFunction out(V);
  for (int i = 0; i < V->dim(); ++i) out.coeffs[i] = f(V->dof_coordinate(i));
  return out;
}

std::vector<std::pair<int, double>> apply_dirichlet(
    const FunctionSpace& space, int marker,
    const std::function<double(const Vec2&)>& g) {
  std::vector<std::pair<int, double>> bcs;
  for (int dof : space.boundary_dofs(marker))
    bcs.emplace_back(dof, g(space.dof_coordinate(dof)));
  return bcs;
}

}  // namespace goalfem
