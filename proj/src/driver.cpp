#include "goalfem/driver.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace goalfem {

namespace {

AdaptResult run_loop(const ProblemSpec& problem,
                     std::shared_ptr<const Mesh> mesh0,
                     const AdaptOptions& options, bool stop_on_tol,
                     int iterations) {
  AdaptResult result;
  std::shared_ptr<const Mesh> mesh = std::move(mesh0);
  std::shared_ptr<FEFunction> prev_u;

  for (int iter = 0; iter < iterations; ++iter) {
    auto t0 = std::chrono::steady_clock::now();
    try {
      auto V = std::make_shared<FunctionSpace>(mesh, options.degree);
      auto W = std::make_shared<FunctionSpace>(mesh, options.degree + 1);

      auto u = std::make_shared<FEFunction>(V);
      if (prev_u) *u = interpolate_from_parent(*prev_u, V);

      std::vector<std::pair<int, double>> bcs;
      std::vector<std::pair<int, double>> homogeneous;
      for (const auto& bc : problem.dirichlet) {
        for (auto [dof, g] : apply_dirichlet(*V, bc.marker, bc.value)) {
          bcs.emplace_back(dof, g);
          homogeneous.emplace_back(dof, 0.0);
        }
      }

      Form F = problem.residual(V, u);
      solve_newton(F, u, bcs);
      double goal_value = assemble_scalar(problem.goal(u));

      // Dual problem: a*(z, v) = M'(v) with homogeneous Dirichlet
      // conditions on the primal Dirichlet markers.
      Form dF = derivative(F, u);
      SparseMatrix J = assemble_matrix(dF);
      SparseMatrix A = assemble_matrix(adjoint(dF));
      SparseMatrix diff = A - SparseMatrix(J.transpose());
      if (diff.norm() > 1e-13 * std::max(J.norm(), 1.0))
        throw std::runtime_error("dual matrix is not the primal transpose");
      Eigen::VectorXd rhs = assemble_vector(derivative(problem.goal(u), u));
      apply_constraints(A, rhs, homogeneous);
      FEFunction z(V);
      z.coeffs = solve_linear(A, rhs, "dual");

      FEFunction Ez = extrapolate(z, W);
      Form r = residual_form(F);
      double eta_h = estimate(r, Ez);

      ResidualRep rep = localize(r);
      // Interpolate into the constrained test space: zeroing the Dirichlet
      // dofs keeps pi_h Ez where Galerkin orthogonality applies, so the
      // signed indicator sum reproduces r(Ez) = eta_h exactly.
      FEFunction piEz = interpolate(Ez, V);
      for (const auto& bc : problem.dirichlet)
        for (int dof : V->boundary_dofs(bc.marker)) piEz.coeffs[dof] = 0.0;
      Indicators ind = indicators(rep, Ez, piEz);

      IterationRecord rec;
      rec.iter = iter;
      rec.cells = mesh->num_cells();
      rec.dofs = V->dim();
      rec.goal = goal_value;
      rec.eta_h = eta_h;
      rec.sum_eta = ind.total();
      if (problem.exact_goal) {
        double err = std::abs(*problem.exact_goal - goal_value);
        rec.exact_error = err;
        if (err > 0.0) {
          rec.eff_h = eta_h / err;
          rec.eff_sum = rec.sum_eta / err;
        }
      }

      bool accept = stop_on_tol && eta_h <= options.tol;
      bool last = iter == iterations - 1;
      std::vector<int> marked;
      if (!accept && !last) {
        if (options.uniform) {
          marked.resize(mesh->num_cells());
          std::iota(marked.begin(), marked.end(), 0);
        } else {
          marked = mark_dorfler(ind.eta, options.alpha);
        }
      }
      rec.marked = static_cast<int>(marked.size());
      rec.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      result.report.iterations.push_back(rec);
      if (options.observer) options.observer(iter, *mesh, ind);

      result.u = u;
      result.mesh = mesh;
      if (accept) {
        result.report.converged = true;
        break;
      }
      if (!last) {
        mesh = std::make_shared<Mesh>(Mesh::refine(*mesh, marked));
        prev_u = u;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("adapt: iteration " + std::to_string(iter) +
                               ": " + e.what());
    }
  }
  return result;
}

}  // namespace

AdaptResult adapt(const ProblemSpec& problem, std::shared_ptr<const Mesh> mesh0,
                  const AdaptOptions& options) {
  if (options.tol <= 0.0) throw std::invalid_argument("adapt: tol must be > 0");
  if (options.alpha <= 0.0 || options.alpha > 1.0)
    throw std::invalid_argument("adapt: alpha must be in (0, 1]");
  return run_loop(problem, std::move(mesh0), options, true, options.max_iter);
}

AdaptResult uniform_baseline(const ProblemSpec& problem,
                             std::shared_ptr<const Mesh> mesh0, int degree,
                             int levels) {
  if (levels < 1)
    throw std::invalid_argument("uniform_baseline: levels must be >= 1");
  AdaptOptions options;
  options.degree = degree;
  options.uniform = true;
  return run_loop(problem, std::move(mesh0), options, false, levels);
}

void AdaptiveReport::write_json(const std::string& path) const {
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : metadata) j["metadata"][key] = value;
  j["converged"] = converged;
  j["iterations"] = nlohmann::ordered_json::array();
  for (const auto& rec : iterations) {
    nlohmann::ordered_json it;
    it["iter"] = rec.iter;
    it["cells"] = rec.cells;
    it["dofs"] = rec.dofs;
    it["goal"] = rec.goal;
    it["eta_h"] = rec.eta_h;
    it["sum_eta_T"] = rec.sum_eta;
    if (rec.exact_error) {
      it["exact_error"] = *rec.exact_error;
      if (rec.eff_h) it["eff_h"] = *rec.eff_h;
      if (rec.eff_sum) it["eff_sum"] = *rec.eff_sum;
    }
    it["marked"] = rec.marked;
    j["iterations"].push_back(std::move(it));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("AdaptiveReport: cannot open " + path);
  out << j.dump(2) << '\n';
}

void AdaptiveReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("AdaptiveReport: cannot open " + path);
  out << "iter,cells,dofs,goal,eta_h,sum_eta_T,exact_error,eff_h,eff_sum,"
         "marked\n";
  out << std::setprecision(12);
  for (const auto& rec : iterations) {
    out << rec.iter << ',' << rec.cells << ',' << rec.dofs << ',' << rec.goal
        << ',' << rec.eta_h << ',' << rec.sum_eta << ',';
    if (rec.exact_error) out << *rec.exact_error;
    out << ',';
    if (rec.eff_h) out << *rec.eff_h;
    out << ',';
    if (rec.eff_sum) out << *rec.eff_sum;
    out << ',' << rec.marked << '\n';
  }
}

}  // namespace goalfem
