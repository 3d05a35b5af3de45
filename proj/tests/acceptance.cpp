// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails. argv[1] must be the path to the
// command-line binary (used for the exit-code and determinism criteria).
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "goalfem/demos.hpp"

using namespace goalfem;

namespace {

std::string g_cli;
std::filesystem::path g_workdir;

std::string sci(double x) {
  std::ostringstream ss;
  ss << x;
  return ss.str();
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const std::filesystem::path& out_dir) {
  std::string cmd = "\"" + g_cli + "\" " + args + " --out \"" +
                    out_dir.string() + "\" > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

std::shared_ptr<const Mesh> bisected_square(int passes) {
  auto mesh = unit_square_mesh(2);
  for (int k = 0; k < passes; ++k) {
    std::vector<int> marked;
    for (int c = 0; c < mesh->num_cells(); c += 3) marked.push_back(c);
    mesh = std::make_shared<Mesh>(Mesh::refine(*mesh, marked));
  }
  return mesh;
}

Form poisson_residual(std::shared_ptr<const FunctionSpace> test_space,
                      std::shared_ptr<FEFunction> u, const FormExpr& f) {
  FormExpr v = FormExpr::test(test_space);
  return (f * v - inner(grad(FormExpr::coefficient(u)), grad(v))) * dx();
}

std::shared_ptr<FEFunction> solve_poisson(
    std::shared_ptr<const FunctionSpace> V, const FormExpr& f) {
  auto u = std::make_shared<FEFunction>(V);
  FormExpr v = FormExpr::test(V);
  Form F = (inner(grad(FormExpr::coefficient(u)), grad(v)) - f * v) * dx();
  auto bcs = apply_dirichlet(*V, 1, [](const Vec2&) { return 0.0; });
  solve_newton(F, u, bcs);
  return u;
}

/// dofs needed to reach the given true error, interpolated on the
/// log(error)-log(dofs) curve of an adaptive report.
double dofs_at_error(const std::vector<IterationRecord>& its, double err) {
  for (size_t k = 1; k < its.size(); ++k) {
    double e0 = *its[k - 1].exact_error;
    double e1 = *its[k].exact_error;
    if ((e0 - err) * (e1 - err) <= 0.0 && e0 != e1) {
      double s = (std::log(err) - std::log(e0)) / (std::log(e1) - std::log(e0));
      return std::exp((1.0 - s) * std::log(double(its[k - 1].dofs)) +
                      s * std::log(double(its[k].dofs)));
    }
  }
  return std::nan("");
}

// --- Criterion 1: Galerkin orthogonality on every demo/iteration ----------

bool criterion_galerkin_orthogonality(std::string& detail) {
  double worst = 0.0;
  for (const std::string& name : demo_names()) {
    Demo demo = make_demo(name);
    std::vector<std::shared_ptr<const Mesh>> meshes;
    AdaptOptions opt;
    opt.observer = [&](int, const Mesh& mesh, const Indicators&) {
      meshes.push_back(std::make_shared<Mesh>(mesh));
    };
    adapt(demo.problem, demo.initial_mesh, opt);
    for (const auto& mesh : meshes) {
      auto V = std::make_shared<FunctionSpace>(mesh, 1);
      auto u = std::make_shared<FEFunction>(V);
      std::vector<std::pair<int, double>> bcs;
      for (const auto& bc : demo.problem.dirichlet)
        for (auto [dof, g] : apply_dirichlet(*V, bc.marker, bc.value))
          bcs.emplace_back(dof, g);
      Form F = demo.problem.residual(V, u);
      auto u0 = std::make_shared<FEFunction>(V);
      Eigen::VectorXd load =
          assemble_vector(residual_form(demo.problem.residual(V, u0)));
      solve_newton(F, u, bcs);
      Eigen::VectorXd r = assemble_vector(residual_form(F));
      for (const auto& [dof, g] : bcs) r[dof] = 0.0;
      double ratio =
          r.lpNorm<Eigen::Infinity>() / load.lpNorm<Eigen::Infinity>();
      worst = std::max(worst, ratio);
    }
  }
  detail = "max |r(phi_i)| / ||load||_inf = " + sci(worst);
  return worst <= 1e-10;
}

// --- Criterion 2: residual reconstruction on the enriched space -----------

bool criterion_reconstruction(std::string& detail) {
  std::vector<std::shared_ptr<const Mesh>> meshes = {
      unit_square_mesh(2), unit_square_mesh(3), bisected_square(1),
      bisected_square(2), bisected_square(3)};
  double worst = 0.0;
  for (int p : {1, 2}) {
    FormExpr f =
        p == 1 ? FormExpr::scalar_function(
                     [](const Vec2& x) { return 1.0 + x.x() - 2.0 * x.y(); }, 1)
               : FormExpr::scalar_function(
                     [](const Vec2& x) {
                       return 1.0 + x.x() * x.y() - x.y() * x.y();
                     },
                     2);
    for (const auto& mesh : meshes) {
      auto V = std::make_shared<FunctionSpace>(mesh, p);
      auto W = std::make_shared<FunctionSpace>(mesh, p + 1);
      auto u = solve_poisson(V, f);
      ResidualRep rep = localize(poisson_residual(V, u, f));
      Eigen::VectorXd paired = apply_residual_rep(rep, *W);
      Eigen::VectorXd direct = assemble_vector(poisson_residual(W, u, f));
      double scale = direct.lpNorm<Eigen::Infinity>();
      worst = std::max(worst,
                       (paired - direct).lpNorm<Eigen::Infinity>() / scale);
    }
  }
  detail = "max relative reconstruction defect = " + sci(worst);
  return worst <= 1e-9;
}

// --- Criterion 3: Poisson hand-derivation oracle ---------------------------

bool criterion_hand_oracle(std::string& detail) {
  auto mesh = std::make_shared<Mesh>(
      Mesh::refine_uniform(Mesh::refine_uniform(*unit_square_mesh(2))));
  auto V = std::make_shared<FunctionSpace>(mesh, 1);
  FormExpr f = FormExpr::constant(1.0);
  auto u = solve_poisson(V, f);
  ResidualRep rep = localize(poisson_residual(V, u, f));
  double worst = 0.0;
  for (int c = 0; c < mesh->num_cells(); ++c) {
    for (int i = 0; i < rep.cell[c].size(); ++i)
      worst = std::max(worst, std::abs(rep.cell[c][i] - 1.0));
    CellGeometry geom = mesh->cell_geometry(c);
    Vec2 centroid = (geom.v[0] + geom.v[1] + geom.v[2]) / 3.0;
    Vec2 gu = u->evaluate_grad(c, centroid);
    for (int e = 0; e < 3; ++e) {
      double expect = -gu.dot(geom.normal[e]);
      for (int k = 0; k < rep.facet[c][e].size(); ++k)
        worst = std::max(worst, std::abs(rep.facet[c][e][k] - expect));
    }
  }
  detail = "max |automated - hand| = " + sci(worst);
  return worst <= 1e-10;
}

// --- Criterion 4: extrapolation reproduces monomials -----------------------

bool criterion_extrapolation(std::string& detail) {
  std::vector<std::shared_ptr<const Mesh>> meshes = {unit_square_mesh(3),
                                                     bisected_square(2)};
  double worst = 0.0;
  for (int p : {1, 2}) {
    for (const auto& mesh : meshes) {
      auto V = std::make_shared<FunctionSpace>(mesh, p);
      auto W = std::make_shared<FunctionSpace>(mesh, p + 1);
      for (int a = 0; a <= p + 1; ++a) {
        for (int b = 0; a + b <= p + 1; ++b) {
          auto q = [a, b](const Vec2& x) {
            return std::pow(x.x(), a) * std::pow(x.y(), b);
          };
          FEFunction Evh = extrapolate(interpolate(q, V), W);
          for (int i = 0; i < W->dim(); ++i)
            worst = std::max(
                worst, std::abs(Evh.coeffs[i] - q(W->dof_coordinate(i))));
        }
      }
    }
  }
  detail = "max dof defect = " + sci(worst);
  return worst <= 1e-8;
}

// --- Criterion 5: efficiency indices on the smooth demo --------------------

bool criterion_efficiency(std::string& detail) {
  Demo demo = make_demo("poisson-smooth");
  AdaptOptions opt;
  opt.tol = 2e-5;
  AdaptResult res = adapt(demo.problem, demo.initial_mesh, opt);
  double lo_h = 1e30, hi_h = 0.0, lo_s = 1e30, hi_s = 0.0;
  int gated = 0;
  for (const auto& rec : res.report.iterations) {
    if (rec.dofs < 1000 || !rec.eff_h) continue;
    ++gated;
    lo_h = std::min(lo_h, *rec.eff_h);
    hi_h = std::max(hi_h, *rec.eff_h);
    lo_s = std::min(lo_s, *rec.eff_sum);
    hi_s = std::max(hi_s, *rec.eff_sum);
  }
  std::ostringstream ss;
  ss << "eta_h/eta in [" << lo_h << ", " << hi_h << "], sum/eta in [" << lo_s
     << ", " << hi_s << "] over " << gated << " iterations with N >= 1e3";
  detail = ss.str();
  return gated >= 1 && lo_h >= 0.8 && hi_h <= 1.2 && lo_s >= 1.0 &&
         hi_s <= 10.0;
}

// --- Criterion 6: adaptive beats uniform on the L-shape --------------------

bool criterion_adaptive_vs_uniform(std::string& detail) {
  Demo demo = make_demo("poisson-lshape");
  AdaptOptions opt;
  opt.tol = 1e-3;
  AdaptResult adaptive = adapt(demo.problem, demo.initial_mesh, opt);
  AdaptResult uniform = uniform_baseline(demo.problem, demo.initial_mesh, 1, 7);
  double err = std::max(*adaptive.report.iterations.back().exact_error,
                        *uniform.report.iterations.back().exact_error);
  double dofs_adaptive = dofs_at_error(adaptive.report.iterations, err);
  double dofs_uniform = dofs_at_error(uniform.report.iterations, err);
  std::ostringstream ss;
  ss << "at error " << err << ": adaptive " << dofs_adaptive << " dofs vs "
     << "uniform " << dofs_uniform << " dofs";
  detail = ss.str();
  return std::isfinite(dofs_adaptive) && std::isfinite(dofs_uniform) &&
         dofs_adaptive <= 0.5 * dofs_uniform;
}

// --- Criterion 7: nonlinear demo end-to-end --------------------------------

bool criterion_nonlinear(std::string& detail) {
  auto out = g_workdir / "nonlinear";
  int code = run_cli("demo nonlinear-poisson --tol 1e-3", out);
  if (code != 0) {
    detail = "exit code " + std::to_string(code);
    return false;
  }
  nlohmann::json j = nlohmann::json::parse(slurp(out / "report.json"));
  double eta_h = j["iterations"].back()["eta_h"].get<double>();
  double goal = j["iterations"].back()["goal"].get<double>();

  Demo demo = make_demo("nonlinear-poisson");
  AdaptResult ref = uniform_baseline(demo.problem, demo.initial_mesh, 2, 5);
  double ref_goal = ref.report.iterations.back().goal;
  std::ostringstream ss;
  ss << "exit 0, eta_h = " << eta_h << ", |goal - reference| = "
     << std::abs(goal - ref_goal);
  detail = ss.str();
  return eta_h <= 1e-3 && std::abs(goal - ref_goal) <= 1e-3;
}

// --- Criterion 8: Doerfler marking properties -------------------------------

bool criterion_marking(std::string& detail) {
  std::mt19937 rng(987654);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + static_cast<int>(rng() % 60);
    Eigen::VectorXd eta(n);
    for (int i = 0; i < n; ++i) eta[i] = rng() % 5 == 0 ? 0.0 : val(rng);
    double total = eta.sum();

    double alpha = 0.01 + 0.99 * val(rng);
    auto marked = mark_dorfler(eta, alpha);
    double sum = 0.0;
    double last = marked.empty() ? 0.0 : eta[marked[0]];
    for (int id : marked) {
      sum += eta[id];
      last = std::min(last, eta[id]);
    }
    if (total > 0.0) {
      if (sum < alpha * total - 1e-12) {
        detail = "threshold missed in trial " + std::to_string(trial);
        return false;
      }
      if (marked.empty() || sum - last >= alpha * total) {
        detail = "marked set not minimal in trial " + std::to_string(trial);
        return false;
      }
    } else if (!marked.empty()) {
      detail = "marked cells despite zero total";
      return false;
    }

    auto all = mark_dorfler(eta, 1.0);
    int positive = 0;
    for (int i = 0; i < n; ++i) positive += eta[i] > 0.0 ? 1 : 0;
    if (static_cast<int>(all.size()) != positive) {
      detail = "alpha = 1 did not mark every positive cell";
      return false;
    }
  }
  detail = "1000 randomized trials";
  return true;
}

// --- Criterion 9: adjoint assembly is the transpose -------------------------

bool criterion_adjoint(std::string& detail) {
  double worst = 0.0;
  for (int passes : {1, 2, 3}) {
    auto V = std::make_shared<FunctionSpace>(bisected_square(passes), 2);
    FormExpr v = FormExpr::test(V);
    FormExpr w = FormExpr::trial(V);
    FormExpr b = FormExpr::constant_vector(Vec2(1.0, -0.5));
    std::vector<Form> forms = {inner(grad(w), grad(v)) * dx(), (w * v) * dx(),
                               (inner(b, grad(w)) * v) * dx()};
    for (const Form& a : forms) {
      SparseMatrix A = assemble_matrix(a);
      SparseMatrix At = assemble_matrix(adjoint(a));
      SparseMatrix diff = At - SparseMatrix(A.transpose());
      double entry = 0.0;
      for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it)
          entry = std::max(entry, std::abs(it.value()));
      worst = std::max(worst, entry);
    }
  }
  detail = "max entrywise |adjoint - transpose| = " + sci(worst);
  return worst <= 1e-13;
}

// --- Criterion 10: byte-identical reports ----------------------------------

bool criterion_determinism(std::string& detail) {
  for (const std::string& name : demo_names()) {
    auto out = g_workdir / (name + "_repeat");
    int c1 = run_cli("demo " + name + " --tol 1e-3", out);
    std::string first = slurp(out / "report.json");
    int c2 = run_cli("demo " + name + " --tol 1e-3", out);
    if (c1 < 0 || c2 < 0 || c1 != c2) {
      detail = name + ": exit codes " + std::to_string(c1) + " vs " +
               std::to_string(c2);
      return false;
    }
    if (first.empty()) {
      detail = name + ": empty report.json";
      return false;
    }
    if (slurp(out / "report.json") != first) {
      detail = name + ": report.json differs between runs";
      return false;
    }
  }
  detail = "all demos byte-identical across consecutive runs";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-cli-binary>\n";
    return 2;
  }
  g_cli = argv[1];
  g_workdir = std::filesystem::temp_directory_path() / "goalfem_acceptance";
  std::filesystem::remove_all(g_workdir);
  std::filesystem::create_directories(g_workdir);

  struct Criterion {
    const char* label;
    bool (*run)(std::string&);
  };
  const Criterion criteria[] = {
      {"1 Galerkin orthogonality across demos/iterations",
       criterion_galerkin_orthogonality},
      {"2 residual reconstruction on the enriched space",
       criterion_reconstruction},
      {"3 Poisson cell/facet residual hand oracle", criterion_hand_oracle},
      {"4 extrapolation reproduces degree p+1 monomials",
       criterion_extrapolation},
      {"5 smooth-demo efficiency indices", criterion_efficiency},
      {"6 adaptive vs uniform dof counts on the L-shape",
       criterion_adaptive_vs_uniform},
      {"7 nonlinear demo convergence and reference goal", criterion_nonlinear},
      {"8 marking threshold and minimality", criterion_marking},
      {"9 adjoint assembly equals the transpose", criterion_adjoint},
      {"10 byte-identical reports", criterion_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.label << " ("
              << detail << ")\n";
    failures += ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
