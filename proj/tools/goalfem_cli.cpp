#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "goalfem/demos.hpp"

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal-oriented adaptive finite element demos"};
  app.require_subcommand(1);

  std::string name;
  double tol = 1e-3;
  double alpha = 0.5;
  int degree = 1;
  int max_iter = 20;
  std::string out_dir = "./out";
  bool uniform = false;
  bool svg = false;
  int seed = 0;

  CLI::App* demo = app.add_subcommand("demo", "Run a built-in demo problem");
  demo->add_option("name", name, "Demo name")
      ->required()
      ->check(CLI::IsMember(goalfem::demo_names()));
  demo->add_option("--tol", tol, "Error tolerance for eta_h");
  demo->add_option("--alpha", alpha, "Doerfler marking fraction in (0,1]");
  demo->add_option("--degree", degree, "Polynomial degree of the primal space")
      ->check(CLI::Range(1, 2));
  demo->add_option("--max-iter", max_iter, "Maximum adaptive iterations");
  demo->add_option("--out", out_dir, "Output directory");
  demo->add_flag("--uniform", uniform, "Refine all cells instead of marking");
  demo->add_flag("--svg", svg, "Write an SVG snapshot of each mesh");
  demo->add_option("--seed", seed, "Reserved (all algorithms deterministic)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    goalfem::Demo d = goalfem::make_demo(name);
    std::filesystem::create_directories(out_dir);

    goalfem::AdaptOptions options;
    options.tol = tol;
    options.alpha = alpha;
    options.degree = degree;
    options.max_iter = max_iter;
    options.uniform = uniform;
    options.observer = [&](int iter, const goalfem::Mesh& mesh,
                           const goalfem::Indicators& ind) {
      std::string base = out_dir + "/mesh_" + std::to_string(iter);
      mesh.write_file(base + ".msh2");
      if (svg) {
        std::ofstream out(base + ".svg");
        mesh.write_svg(out);
      }
      ind.write_csv(out_dir + "/indicators_" + std::to_string(iter) + ".csv");
    };

    goalfem::AdaptResult result = goalfem::adapt(d.problem, d.initial_mesh,
                                                 options);
    result.report.metadata = {
        {"demo", name},           {"tol", fmt(tol)},
        {"alpha", fmt(alpha)},    {"degree", std::to_string(degree)},
        {"max_iter", std::to_string(max_iter)},
        {"out", out_dir},         {"uniform", uniform ? "true" : "false"},
        {"svg", svg ? "true" : "false"},
        {"seed", std::to_string(seed)},
    };
    result.report.write_json(out_dir + "/report.json");
    result.report.write_csv(out_dir + "/report.csv");

    const goalfem::IterationRecord& last = result.report.iterations.back();
    std::cout << "goal = " << fmt(last.goal) << '\n';
    std::cout << "eta_h = " << fmt(last.eta_h) << '\n';
    return result.report.converged ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
