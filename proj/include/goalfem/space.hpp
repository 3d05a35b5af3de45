#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "goalfem/mesh.hpp"
#include "goalfem/quadrature.hpp"

namespace goalfem {

/// Scalar Lagrange element of degree p on the reference triangle.
/// Node ordering: vertices (0,0),(1,0),(0,1); then p-1 nodes per edge
/// (edge e opposite vertex e, nodes along the edge from vertex (e+1)%3 to
/// (e+2)%3); then interior nodes.
class ReferenceElement {
 public:
  explicit ReferenceElement(int degree);

  int degree() const { return degree_; }
  int dim() const { return static_cast<int>(nodes_.size()); }
  const Vec2& node(int i) const { return nodes_[i]; }

  /// Basis values at a reference point.
  Eigen::VectorXd eval(const Vec2& ref) const;
  /// Basis gradients (reference coordinates) at a reference point.
  Eigen::MatrixXd eval_grad(const Vec2& ref) const;

  static const ReferenceElement& get(int degree);

 private:
  int degree_;
  std::vector<Vec2> nodes_;
  std::vector<std::pair<int, int>> mono_;  // exponents (a, b) of xi^a eta^b
  Eigen::MatrixXd coeff_;                  // coeff_(i, j): basis i, monomial j
};

/// Continuous Lagrange space of degree p in {1,2,3} on a triangle mesh.
/// Dof layout: vertices first, then p-1 dofs per facet ordered along the
/// facet from its lower vertex, then interior cell dofs.
class FunctionSpace {
 public:
  FunctionSpace(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int dim() const { return dim_; }
  int local_dim() const { return element().dim(); }
  const ReferenceElement& element() const { return ReferenceElement::get(degree_); }

  const std::vector<int>& cell_dofs(int c) const { return cell_dofs_[c]; }
  const Vec2& dof_coordinate(int dof) const { return dof_coords_[dof]; }

  /// Dofs on boundary facets with the given marker, ascending.
  std::vector<int> boundary_dofs(int marker) const;
  /// Dofs lying on a given facet (vertex + edge dofs), ascending.
  std::vector<int> facet_dofs(int f) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  int dim_;
  std::vector<std::vector<int>> cell_dofs_;
  std::vector<Vec2> dof_coords_;
};

/// A coefficient vector over a function space.
class FEFunction {
 public:
  explicit FEFunction(std::shared_ptr<const FunctionSpace> space)
      : space_(std::move(space)) {
    coeffs = Eigen::VectorXd::Zero(space_->dim());
  }

  const FunctionSpace& space() const { return *space_; }
  std::shared_ptr<const FunctionSpace> space_ptr() const { return space_; }

  /// Value at a physical point known to lie in the given cell.
  double evaluate(int cell, const Vec2& x) const;
  /// Gradient at a physical point known to lie in the given cell.
  Vec2 evaluate_grad(int cell, const Vec2& x) const;

  /// Value and gradient from precomputed reference basis tables.
  double value_from_tables(int cell, const Eigen::VectorXd& basis) const;
  Vec2 grad_from_tables(int cell, const Eigen::MatrixXd& ref_grads,
                        const Eigen::Matrix2d& jac_inv) const;

  void write_csv(const std::string& path) const;

  Eigen::VectorXd coeffs;

 private:
  std::shared_ptr<const FunctionSpace> space_;
};

/// Nodal interpolation of f into V (same mesh).
FEFunction interpolate(const FEFunction& f, std::shared_ptr<const FunctionSpace> V);

/// Nodal interpolation across one refinement: f lives on the mesh that
/// V's mesh was refined from; parent_cell lineage locates the evaluation cells.
FEFunction interpolate_from_parent(const FEFunction& f,
                                   std::shared_ptr<const FunctionSpace> V);

/// Nodal interpolation of a callable.
FEFunction interpolate(const std::function<double(const Vec2&)>& f,
                       std::shared_ptr<const FunctionSpace> V);

/// Dirichlet pairs (dof, g(dof coordinate)) on facets with the given marker,
/// ascending dof order.
std::vector<std::pair<int, double>> apply_dirichlet(
    const FunctionSpace& space, int marker,
    const std::function<double(const Vec2&)>& g);

}  // namespace goalfem
