#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "goalfem/mesh.hpp"

using namespace goalfem;

namespace {

Mesh two_triangle_square() {
  std::vector<Vec2> vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<std::array<int, 3>> cells = {{0, 1, 2}, {0, 2, 3}};
  std::map<std::array<int, 2>, int> markers = {
      {{0, 1}, 1}, {{1, 2}, 1}, {{2, 3}, 1}, {{0, 3}, 1}};
  return Mesh(std::move(vertices), std::move(cells), std::move(markers));
}

Mesh single_reference_triangle() {
  std::vector<Vec2> vertices = {{0, 0}, {1, 0}, {0, 1}};
  std::vector<std::array<int, 3>> cells = {{0, 1, 2}};
  std::map<std::array<int, 2>, int> markers = {
      {{0, 1}, 1}, {{1, 2}, 1}, {{0, 2}, 1}};
  return Mesh(std::move(vertices), std::move(cells), std::move(markers));
}

void check_conforming(const Mesh& m) {
  for (int f = 0; f < m.num_facets(); ++f) {
    size_t uses = m.facet_cells(f).size();
    REQUIRE(uses >= 1);
    REQUIRE(uses <= 2);
    if (uses == 2)
      REQUIRE(m.facet_cells(f)[0].cell < m.facet_cells(f)[1].cell);
    for (const auto& use : m.facet_cells(f)) {
      const auto& c = m.cell(use.cell);
      std::array<int, 2> edge = canonical_edge(c[(use.local_edge + 1) % 3],
                                               c[(use.local_edge + 2) % 3]);
      REQUIRE(edge == m.facet(f));
    }
  }
}

double min_angle(const Mesh& m) {
  double best = M_PI;
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto& cv = m.cell(c);
    for (int i = 0; i < 3; ++i) {
      Vec2 a = m.vertex(cv[(i + 1) % 3]) - m.vertex(cv[i]);
      Vec2 b = m.vertex(cv[(i + 2) % 3]) - m.vertex(cv[i]);
      best = std::min(best, std::acos(a.dot(b) / (a.norm() * b.norm())));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("single triangle connectivity") {
  Mesh m = single_reference_triangle();
  CHECK(m.num_vertices() == 3);
  CHECK(m.num_cells() == 1);
  CHECK(m.num_facets() == 3);
  for (int f = 0; f < 3; ++f) {
    CHECK(m.facet_cells(f).size() == 1);
    CHECK(m.facet_on_boundary(f));
    CHECK(m.facet_marker(f) == 1);
  }
  CHECK(m.total_area() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("two-triangle square connectivity") {
  Mesh m = two_triangle_square();
  CHECK(m.num_facets() == 5);
  int interior = 0;
  for (int f = 0; f < m.num_facets(); ++f) {
    if (!m.facet_on_boundary(f)) {
      ++interior;
      CHECK(m.facet(f) == std::array<int, 2>{0, 2});
      CHECK(m.facet_marker(f) == -1);
    }
  }
  CHECK(interior == 1);
  check_conforming(m);
  // Facets are sorted lexicographically by canonical vertex pair.
  for (int f = 1; f < m.num_facets(); ++f) CHECK(m.facet(f - 1) < m.facet(f));
}

TEST_CASE("construction rejects bad input") {
  std::vector<Vec2> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  // Clockwise cell.
  CHECK_THROWS(Mesh(v, {{0, 2, 1}, {0, 2, 3}},
                    {{{0, 1}, 1}, {{1, 2}, 1}, {{2, 3}, 1}, {{0, 3}, 1}}));
  // Degenerate cell.
  CHECK_THROWS(Mesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}, {}));
  // Missing boundary marker.
  CHECK_THROWS(Mesh(v, {{0, 1, 2}, {0, 2, 3}},
                    {{{0, 1}, 1}, {{1, 2}, 1}, {{2, 3}, 1}}));
  // Marker on an interior facet.
  CHECK_THROWS(Mesh(v, {{0, 1, 2}, {0, 2, 3}},
                    {{{0, 1}, 1}, {{1, 2}, 1}, {{2, 3}, 1}, {{0, 3}, 1},
                     {{0, 2}, 1}}));
}

TEST_CASE("cell geometry") {
  Mesh m = two_triangle_square();
  CellGeometry g = m.cell_geometry(0);  // (0,0),(1,0),(1,1)
  CHECK(g.area == doctest::Approx(0.5).epsilon(1e-14));
  // Outward unit normals, perpendicular to their edges.
  for (int e = 0; e < 3; ++e) {
    CHECK(g.normal[e].norm() == doctest::Approx(1.0).epsilon(1e-14));
    Vec2 mid = 0.5 * (g.v[(e + 1) % 3] + g.v[(e + 2) % 3]);
    Vec2 centroid = (g.v[0] + g.v[1] + g.v[2]) / 3.0;
    CHECK(g.normal[e].dot(mid - centroid) > 0.0);
    Vec2 tangent = g.v[(e + 2) % 3] - g.v[(e + 1) % 3];
    CHECK(std::abs(g.normal[e].dot(tangent)) < 1e-14);
    CHECK(g.edge_length[e] == doctest::Approx(tangent.norm()).epsilon(1e-14));
  }
  // Reference map round trip.
  Vec2 x(0.7, 0.3);
  CHECK((g.to_physical(g.to_reference(x)) - x).norm() < 1e-14);
}

TEST_CASE("barycentric coordinates") {
  Mesh m = two_triangle_square();
  CellGeometry g = m.cell_geometry(0);
  // Midpoint of the edge opposite vertex 0.
  Vec2 mid = 0.5 * (g.v[1] + g.v[2]);
  Eigen::Vector3d lam = g.barycentric(mid);
  CHECK(lam[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(lam[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(lam[2] == doctest::Approx(0.5).epsilon(1e-14));
  // Exact for affine data.
  auto f = [](const Vec2& x) { return 3.0 + 2.0 * x.x() - 5.0 * x.y(); };
  Vec2 x(0.8, 0.4);
  lam = g.barycentric(x);
  double interp = lam[0] * f(g.v[0]) + lam[1] * f(g.v[1]) + lam[2] * f(g.v[2]);
  CHECK(interp == doctest::Approx(f(x)).epsilon(1e-13));
  // Gradients of the barycentric coordinates sum to zero.
  CHECK((g.grad_lambda(0) + g.grad_lambda(1) + g.grad_lambda(2)).norm() <
        1e-13);
}

TEST_CASE("longest-edge initial refinement edge") {
  Mesh m = two_triangle_square();
  // Cell 0 = (0,0),(1,0),(1,1): hypotenuse is edge 1 (opposite vertex 1).
  CHECK(m.refinement_edge(0) == 1);
  CHECK(m.refinement_edge(1) == 2);
}

TEST_CASE("bisection of marked cells") {
  Mesh m = two_triangle_square();
  Mesh r = Mesh::refine(m, {0});
  CHECK(r.num_cells() == 4);  // closure splits the neighbor too
  check_conforming(r);
  CHECK(r.total_area() == doctest::Approx(1.0).epsilon(1e-12));
  for (int c = 0; c < r.num_cells(); ++c) {
    int parent = r.parent_cell(c);
    CHECK(parent >= 0);
    CHECK(parent < 2);
    CHECK(r.cell_geometry(c).area ==
          doctest::Approx(0.5 * m.cell_geometry(parent).area).epsilon(1e-12));
  }
  // First bisection splits the diagonal only; boundary is untouched.
  int boundary = 0;
  for (int f = 0; f < r.num_facets(); ++f)
    if (r.facet_on_boundary(f)) {
      ++boundary;
      CHECK(r.facet_marker(f) == 1);
    }
  CHECK(boundary == 4);
  // The next pass bisects boundary edges; sub-facets inherit the marker.
  Mesh r2 = Mesh::refine_uniform(r);
  check_conforming(r2);
  boundary = 0;
  for (int f = 0; f < r2.num_facets(); ++f)
    if (r2.facet_on_boundary(f)) {
      ++boundary;
      CHECK(r2.facet_marker(f) == 1);
    }
  CHECK(boundary == 8);
}

TEST_CASE("uniform refinement stays shape regular") {
  Mesh m = two_triangle_square();
  double angle0 = min_angle(m);
  int prev_cells = m.num_cells();
  for (int pass = 0; pass < 6; ++pass) {
    m = Mesh::refine_uniform(m);
    check_conforming(m);
    CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.num_cells() >= 2 * prev_cells);
    CHECK(m.num_cells() <= 4 * prev_cells);
    CHECK(min_angle(m) >= 0.5 * angle0 - 1e-12);
    prev_cells = m.num_cells();
  }
}

TEST_CASE("text format round trip") {
  Mesh m = Mesh::refine(two_triangle_square(), {0, 1});
  std::stringstream s;
  m.write(s);
  std::string text = s.str();
  CHECK(text.substr(0, 8) == "mesh2d 1");
  Mesh back = Mesh::read(s);
  REQUIRE(back.num_vertices() == m.num_vertices());
  REQUIRE(back.num_cells() == m.num_cells());
  REQUIRE(back.num_facets() == m.num_facets());
  for (int i = 0; i < m.num_vertices(); ++i)
    CHECK((back.vertex(i) - m.vertex(i)).norm() == 0.0);
  for (int c = 0; c < m.num_cells(); ++c) CHECK(back.cell(c) == m.cell(c));
  for (int f = 0; f < m.num_facets(); ++f)
    CHECK(back.facet_marker(f) == m.facet_marker(f));
  // Writing the read-back mesh reproduces the bytes.
  std::stringstream s2;
  back.write(s2);
  CHECK(s2.str() == text);
}

TEST_CASE("svg snapshot") {
  Mesh m = two_triangle_square();
  std::stringstream s;
  m.write_svg(s);
  std::string svg = s.str();
  CHECK(svg.find("<svg") != std::string::npos);
  size_t paths = 0;
  for (size_t pos = 0; (pos = svg.find("<path", pos)) != std::string::npos;
       ++pos)
    ++paths;
  CHECK(paths == static_cast<size_t>(m.num_cells()));
}
