#include "goalfem/demos.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "goalfem/quadrature.hpp"

namespace goalfem {

namespace {

/// Structured grid over [x0,x1] x [y0,y1] with nx x ny squares, each split
/// into two CCW triangles; squares are dropped when keep returns false.
/// Boundary facet markers come from the facet midpoint.
std::shared_ptr<const Mesh> grid_mesh(
    double x0, double x1, double y0, double y1, int nx, int ny,
    const std::function<bool(int, int)>& keep,
    const std::function<int(const Vec2&)>& marker) {
  std::vector<Vec2> vertices;
  std::vector<int> vertex_id((nx + 1) * (ny + 1), -1);
  auto grid_id = [&](int i, int j) { return j * (nx + 1) + i; };

  std::vector<std::array<int, 3>> cells;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!keep(i, j)) continue;
      int corner[4] = {grid_id(i, j), grid_id(i + 1, j), grid_id(i + 1, j + 1),
                       grid_id(i, j + 1)};
      for (int g : corner) {
        if (vertex_id[g] < 0) {
          vertex_id[g] = static_cast<int>(vertices.size());
          int gi = g % (nx + 1), gj = g / (nx + 1);
          vertices.emplace_back(x0 + (x1 - x0) * gi / nx,
                                y0 + (y1 - y0) * gj / ny);
        }
      }
      int v00 = vertex_id[corner[0]], v10 = vertex_id[corner[1]];
      int v11 = vertex_id[corner[2]], v01 = vertex_id[corner[3]];
      cells.push_back({v00, v10, v11});
      cells.push_back({v00, v11, v01});
    }
  }

  std::map<std::array<int, 2>, int> edge_count;
  for (const auto& c : cells)
    for (int e = 0; e < 3; ++e)
      edge_count[canonical_edge(c[(e + 1) % 3], c[(e + 2) % 3])] += 1;
  std::map<std::array<int, 2>, int> markers;
  for (const auto& [edge, count] : edge_count) {
    if (count != 1) continue;
    Vec2 mid = 0.5 * (vertices[edge[0]] + vertices[edge[1]]);
    markers[edge] = marker(mid);
  }
  return std::make_shared<Mesh>(std::move(vertices), std::move(cells),
                                std::move(markers));
}

}  // namespace

std::shared_ptr<const Mesh> unit_square_mesh(int n) {
  return grid_mesh(0, 1, 0, 1, n, n, [](int, int) { return true; },
                   [](const Vec2&) { return 1; });
}

std::shared_ptr<const Mesh> unit_square_mesh_left(int n) {
  return grid_mesh(0, 1, 0, 1, n, n, [](int, int) { return true; },
                   [](const Vec2& mid) { return mid.x() == 0.0 ? 1 : 2; });
}

std::shared_ptr<const Mesh> lshape_mesh(int n) {
  return grid_mesh(
      -1, 1, -1, 1, 2 * n, 2 * n,
      [n](int i, int j) { return !(i >= n && j < n); },
      [](const Vec2& mid) { return mid.x() == -1.0 ? 2 : 1; });
}

double lshape_exact(const Vec2& x) {
  double r = x.norm();
  if (r == 0.0) return 0.0;
  double theta = std::atan2(x.y(), x.x());
  if (theta < 0.0) theta += 2.0 * M_PI;
  return std::pow(r, 2.0 / 3.0) * std::sin(2.0 * theta / 3.0);
}

namespace {

double lshape_flux(const Vec2& x) {
  // -du/dx of the exact solution, i.e. the outward normal flux on x = -1.
  double r = x.norm();
  double theta = std::atan2(x.y(), x.x());
  if (theta < 0.0) theta += 2.0 * M_PI;
  return 2.0 / 3.0 * std::pow(r, -1.0 / 3.0) * std::sin(theta / 3.0);
}

double lshape_goal_reference() {
  // Integral of the exact solution over the x = -1 side by 64-point Gauss.
  LineQuadratureRule rule = line_rule(127);
  double out = 0.0;
  for (int q = 0; q < rule.size(); ++q)
    out += 2.0 * rule.weights[q] *
           lshape_exact(Vec2(-1.0, -1.0 + 2.0 * rule.points[q]));
  return out;
}

Demo poisson_smooth() {
  Demo demo;
  demo.name = "poisson-smooth";
  demo.initial_mesh = unit_square_mesh(4);
  demo.problem.residual = [](std::shared_ptr<const FunctionSpace> V,
                             std::shared_ptr<FEFunction> u) {
    FormExpr v = FormExpr::test(V);
    FormExpr uc = FormExpr::coefficient(u);
    FormExpr f = FormExpr::scalar_function(
        [](const Vec2& x) {
          return 2.0 * x.y() * (1.0 - x.y()) + 2.0 * x.x() * (1.0 - x.x());
        },
        2);
    return (inner(grad(uc), grad(v)) - f * v) * dx();
  };
  demo.problem.goal = [](std::shared_ptr<FEFunction> u) {
    return FormExpr::coefficient(u) * dx();
  };
  demo.problem.dirichlet = {{1, [](const Vec2&) { return 0.0; }}};
  demo.problem.exact_goal = 1.0 / 36.0;
  return demo;
}

Demo poisson_lshape() {
  Demo demo;
  demo.name = "poisson-lshape";
  demo.initial_mesh = lshape_mesh(4);
  demo.problem.residual = [](std::shared_ptr<const FunctionSpace> V,
                             std::shared_ptr<FEFunction> u) {
    FormExpr v = FormExpr::test(V);
    FormExpr uc = FormExpr::coefficient(u);
    FormExpr g = FormExpr::scalar_function(lshape_flux, 8);
    return inner(grad(uc), grad(v)) * dx() + (-(g * v)) * ds(2);
  };
  demo.problem.goal = [](std::shared_ptr<FEFunction> u) {
    return FormExpr::coefficient(u) * ds(2);
  };
  demo.problem.dirichlet = {{1, lshape_exact}};
  demo.problem.exact_goal = lshape_goal_reference();
  return demo;
}

Demo nonlinear_poisson() {
  Demo demo;
  demo.name = "nonlinear-poisson";
  demo.initial_mesh = unit_square_mesh_left(8);
  demo.problem.residual = [](std::shared_ptr<const FunctionSpace> V,
                             std::shared_ptr<FEFunction> u) {
    FormExpr v = FormExpr::test(V);
    FormExpr uc = FormExpr::coefficient(u);
    FormExpr f = FormExpr::constant(1.0);
    return (inner((FormExpr::constant(1.0) + pow(uc, 2)) * grad(uc), grad(v)) -
            f * v) *
           dx();
  };
  demo.problem.goal = [](std::shared_ptr<FEFunction> u) {
    return FormExpr::coefficient(u) * dx();
  };
  demo.problem.dirichlet = {{1, [](const Vec2&) { return 0.0; }}};
  return demo;
}

}  // namespace

Demo make_demo(const std::string& name) {
  if (name == "poisson-smooth") return poisson_smooth();
  if (name == "poisson-lshape") return poisson_lshape();
  if (name == "nonlinear-poisson") return nonlinear_poisson();
  throw std::invalid_argument("unknown demo: " + name);
}

std::vector<std::string> demo_names() {
  return {"poisson-smooth", "poisson-lshape", "nonlinear-poisson"};
}

}  // namespace goalfem
