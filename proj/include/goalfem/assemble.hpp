#pragma once

#include <Eigen/Sparse>

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "goalfem/forms.hpp"

namespace goalfem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Assemble a bilinear form into a sparse matrix; entry (i, j) = a(phi_j, phi_i).
SparseMatrix assemble_matrix(const Form& a);

/// Assemble a linear form into a vector.
Eigen::VectorXd assemble_vector(const Form& L);

/// Assemble a functional (no arguments) into a scalar; the mesh is taken
/// from the first coefficient appearing in the form.
double assemble_scalar(const Form& M);
/// Functional assembly over an explicit mesh (for coefficient-free forms).
double assemble_scalar(const Form& M, const Mesh& mesh);

/// Evaluate a linear form at a concrete function: L(w). w may live in any
/// space on the same mesh (e.g. the enriched dual approximation).
double apply_functional(const Form& L, const FEFunction& w);

/// A test field defined locally on one cell through its barycentric
/// coordinates; gradients are physical.
struct LocalTestField {
  std::function<double(const Eigen::Vector3d&)> value;
  std::function<Vec2(const Eigen::Vector3d&)> gradient;
};

/// Evaluate the cell-local part r_T(w_k) of a linear form for a family of
/// local test fields on one cell: the dx terms restricted to the cell plus,
/// when include_facet_terms, the ds terms on the cell's boundary facets
/// (restricted to only_local_edge when >= 0). test_degree is the polynomial
/// degree of the w_k, used for quadrature selection.
Eigen::VectorXd apply_local_tests(const Form& r, int cell,
                                  const std::vector<LocalTestField>& tests,
                                  int test_degree,
                                  bool include_facet_terms = true,
                                  int only_local_edge = -1);

/// Symmetric elimination of Dirichlet constraints: constrained rows/columns
/// are cleared, known values moved to the rhs, diagonal set to one.
void apply_constraints(SparseMatrix& A, Eigen::VectorXd& b,
                       const std::vector<std::pair<int, double>>& bcs);

/// Sparse direct solve; verifies the residual and names the system on failure.
Eigen::VectorXd solve_linear(const SparseMatrix& A, const Eigen::VectorXd& b,
                             const std::string& label);

struct NewtonResult {
  int iterations = 0;
  std::vector<double> residuals;  // free-dof residual norms, initial first
};

struct NewtonError : std::runtime_error {
  NewtonError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residuals(std::move(history)) {}
  std::vector<double> residuals;
};

/// Newton iteration on F(u; v) = 0, full steps. Dirichlet values are imposed
/// on u before the first iteration; increments are homogeneous.
NewtonResult solve_newton(const Form& F, const std::shared_ptr<FEFunction>& u,
                          const std::vector<std::pair<int, double>>& bcs,
                          double tol_rel = 1e-10, int max_iter = 25);

/// Coordinate text export ("i j value" per line) for debugging.
void write_matrix(const SparseMatrix& A, std::ostream& out);

/// Euclidean norm over unconstrained entries.
double free_norm(const Eigen::VectorXd& v,
                 const std::vector<std::pair<int, double>>& bcs);

}  // namespace goalfem
