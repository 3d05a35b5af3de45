#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "goalfem/assemble.hpp"

namespace goalfem {

/// Cubic cell bubble lambda_0 lambda_1 lambda_2 as a cell-local test field.
LocalTestField bubble_field(const CellGeometry& geom);

/// Cone function of local edge e: product of the barycentric coordinates of
/// the edge's two vertices. Vanishes on the other two edges and restricts to
/// the 1D edge bubble t(1-t) on edge e.
LocalTestField cone_field(const CellGeometry& geom, int local_edge);

/// Localized residual: per cell a degree-p polynomial R_T (coefficients in
/// the local Lagrange basis), per (cell, local edge) a degree-q polynomial
/// R_dT (values at the q+1 equispaced nodes t_k = k/q along the edge from
/// local vertex (e+1)%3 to (e+2)%3). q = p.
struct ResidualRep {
  int degree = 0;  // p = q
  std::shared_ptr<const Mesh> mesh;
  std::vector<Eigen::VectorXd> cell;
  std::vector<std::array<Eigen::VectorXd, 3>> facet;

  /// Value of R_T at barycentric coordinates on a cell.
  double cell_value(int c, const Eigen::Vector3d& lam) const;
  /// Value of R_dT|_S at edge parameter t on local edge e of cell c.
  double facet_value(int c, int e, double t) const;
};

/// Solve the bubble- and cone-weighted local problems for every cell:
/// <R_T, b_T phi_i>_T = r_T(b_T phi_i) and
/// <R_dT|_S, beta_S phi_i>_S = r_T(beta_S phi_i) - <R_T, beta_S phi_i>_T.
/// r must be a linear form in a test function of degree p.
ResidualRep localize(const Form& r);

/// Patch least-squares extrapolation of v into the degree-(p+1) space W on
/// the same mesh: per cell fit a degree-(p+1) polynomial to the dof values
/// of v on the vertex patch, evaluate at the cell's W-dofs, average shared
/// dofs across incident cells.
FEFunction extrapolate(const FEFunction& v,
                       std::shared_ptr<const FunctionSpace> W);

/// Global error estimate eta_h = |r(Ez)|.
double estimate(const Form& r, const FEFunction& Ez);

struct Indicators {
  Eigen::VectorXd eta;                   // per-cell |contribution|
  Eigen::VectorXd signed_contribution;   // per-cell signed contribution
  double signed_sum = 0.0;
  double eta_h = 0.0;  // |signed_sum|

  double total() const { return eta.sum(); }
  void write_csv(const std::string& path) const;
};

/// Per-cell dual-weighted contributions
/// <R_T, Ez - piEz>_T + {<R_dT, Ez - piEz>_dT}, with interior facets
/// weighted 1/2 per incident cell and boundary facets weighted 1.
Indicators indicators(const ResidualRep& rep, const FEFunction& Ez,
                      const FEFunction& piEz);

/// Pair the localized residual with every basis function of a space W on the
/// same mesh (facet terms with the 1/2 interior split); reproduces the
/// assembled residual vector on W when the representation is exact.
Eigen::VectorXd apply_residual_rep(const ResidualRep& rep,
                                   const FunctionSpace& W);

/// Doerfler marking: minimal set of largest-indicator cells whose indicator
/// sum reaches alpha times the total. Ties broken by ascending cell id;
/// returns ascending cell ids; empty when the total is zero.
std::vector<int> mark_dorfler(const Eigen::VectorXd& eta, double alpha);

}  // namespace goalfem
