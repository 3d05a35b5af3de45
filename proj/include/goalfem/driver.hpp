#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "goalfem/dwr.hpp"

namespace goalfem {

struct DirichletData {
  int marker;
  std::function<double(const Vec2&)> value;
};

/// A variational problem F(u; v) = 0 with goal functional M(u), stated as
/// builders so the problem can be re-instantiated on every refined mesh.
struct ProblemSpec {
  /// Semilinear residual form, linear in an implicit test function of V.
  std::function<Form(std::shared_ptr<const FunctionSpace>,
                     std::shared_ptr<FEFunction>)>
      residual;
  /// Goal functional of the solution.
  std::function<Form(std::shared_ptr<FEFunction>)> goal;
  std::vector<DirichletData> dirichlet;
  std::optional<double> exact_goal;
};

struct IterationRecord {
  int iter = 0;
  int cells = 0;
  int dofs = 0;
  double goal = 0.0;
  double eta_h = 0.0;
  double sum_eta = 0.0;
  std::optional<double> exact_error;
  std::optional<double> eff_h;
  std::optional<double> eff_sum;
  int marked = 0;
  double seconds = 0.0;  // wall clock, console diagnostics only
};

struct AdaptiveReport {
  bool converged = false;
  std::vector<IterationRecord> iterations;
  std::map<std::string, std::string> metadata;  // flag name -> value

  /// JSON report: {"metadata": {...}, "converged": ..., "iterations": [...]}.
  /// Timings are excluded so identical inputs give identical bytes.
  void write_json(const std::string& path) const;
  /// One row per iteration, header
  /// iter,cells,dofs,goal,eta_h,sum_eta_T,exact_error,eff_h,eff_sum,marked;
  /// exact-error columns empty when the exact goal is unknown.
  void write_csv(const std::string& path) const;
};

struct AdaptResult {
  std::shared_ptr<FEFunction> u;
  std::shared_ptr<const Mesh> mesh;
  AdaptiveReport report;
};

struct AdaptOptions {
  double tol = 1e-3;
  double alpha = 0.5;
  int degree = 1;
  int max_iter = 20;
  bool uniform = false;  // mark all cells instead of Doerfler marking
  /// Called once per iteration with the iteration's mesh and indicators.
  std::function<void(int iter, const Mesh&, const Indicators&)> observer;
};

/// Goal-oriented adaptive loop: solve primal (Newton), solve the adjoint
/// dual with the linearized goal as right-hand side and homogeneous
/// Dirichlet conditions on the primal Dirichlet markers, extrapolate the
/// dual to degree p+1, evaluate eta_h = |r(Ez)|, and stop or mark/refine.
AdaptResult adapt(const ProblemSpec& problem, std::shared_ptr<const Mesh> mesh0,
                  const AdaptOptions& options);

/// Same pipeline with mark-all refinement, run for exactly `levels`
/// iterations regardless of the estimate (comparison curve).
AdaptResult uniform_baseline(const ProblemSpec& problem,
                             std::shared_ptr<const Mesh> mesh0, int degree,
                             int levels);

}  // namespace goalfem
