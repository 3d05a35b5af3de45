#pragma once

#include <memory>
#include <string>
#include <vector>

#include "goalfem/driver.hpp"

namespace goalfem {

/// Structured triangulation of the unit square, 2*n*n cells, every boundary
/// facet marked 1.
std::shared_ptr<const Mesh> unit_square_mesh(int n);

/// Unit square with the x = 0 side marked 1 and the rest of the boundary
/// marked 2 (Dirichlet on the left only).
std::shared_ptr<const Mesh> unit_square_mesh_left(int n);

/// L-shaped domain (-1,1)^2 minus (0,1)x(-1,0), mesh width 1/n. The x = -1
/// side is marked 2 (goal/Neumann boundary), the rest of the boundary 1.
std::shared_ptr<const Mesh> lshape_mesh(int n);

/// Exact solution r^(2/3) sin(2 theta / 3) of the L-shape problem,
/// theta in [0, 3 pi / 2] measured from the positive x-axis.
double lshape_exact(const Vec2& x);

struct Demo {
  std::string name;
  std::shared_ptr<const Mesh> initial_mesh;
  ProblemSpec problem;
};

/// Built-in demo problems: poisson-smooth, poisson-lshape, nonlinear-poisson.
Demo make_demo(const std::string& name);

std::vector<std::string> demo_names();

}  // namespace goalfem
