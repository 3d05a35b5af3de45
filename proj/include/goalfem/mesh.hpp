#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace goalfem {

using Vec2 = Eigen::Vector2d;

/// Geometry of one triangle: affine reference map, measures, and
/// per-edge outward normals. Local edge e is the edge opposite local
/// vertex e, i.e. it connects vertices (e+1)%3 and (e+2)%3.
struct CellGeometry {
  std::array<Vec2, 3> v;
  Eigen::Matrix2d jac;      // x = v[0] + jac * (xi, eta)
  Eigen::Matrix2d jac_inv;
  double area = 0.0;
  std::array<Vec2, 3> normal;
  std::array<double, 3> edge_length;

  Vec2 to_physical(const Vec2& ref) const { return v[0] + jac * ref; }
  Vec2 to_reference(const Vec2& x) const { return jac_inv * (x - v[0]); }

  /// Barycentric coordinates (lambda_0, lambda_1, lambda_2) of x,
  /// lambda_i = 1 at vertex i.
  Eigen::Vector3d barycentric(const Vec2& x) const;

  /// Gradient of barycentric coordinate i (constant on the cell).
  Vec2 grad_lambda(int i) const;
};

/// Conforming 2D triangle mesh. Immutable after construction; refinement
/// returns a new mesh. Cells are CCW vertex triples; facets are canonical
/// ascending vertex pairs, indexed in lexicographic order.
class Mesh {
 public:
  struct FacetUse {
    int cell;
    int local_edge;
  };

  /// Builds a mesh and derives facet connectivity. Throws on degenerate or
  /// CW cells, non-manifold facets, missing/extra boundary markers.
  /// refinement_edges may be empty, in which case the refinement edge of
  /// each cell is its longest edge (ties by lowest vertex pair).
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells,
       std::map<std::array<int, 2>, int> boundary_markers,
       std::vector<int> refinement_edges = {},
       std::vector<int> parent_cells = {});

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_facets() const { return static_cast<int>(facets_.size()); }

  const Vec2& vertex(int i) const { return vertices_[i]; }
  const std::array<int, 3>& cell(int c) const { return cells_[c]; }
  const std::array<int, 2>& facet(int f) const { return facets_[f]; }

  /// Incident (cell, local edge) pairs of a facet; interior facets have
  /// exactly two (lower cell id first), boundary facets one.
  const std::vector<FacetUse>& facet_cells(int f) const {
    return facet_cells_[f];
  }
  bool facet_on_boundary(int f) const { return facet_cells_[f].size() == 1; }
  /// Marker of a boundary facet; -1 for interior facets.
  int facet_marker(int f) const { return facet_markers_[f]; }
  /// Global facet index of a cell's local edge.
  int cell_facet(int c, int local_edge) const {
    return cell_facets_[c][local_edge];
  }

  int refinement_edge(int c) const { return refinement_edges_[c]; }

  /// Ancestor cell in the mesh this one was refined from; identity map
  /// for meshes not produced by refine().
  int parent_cell(int c) const { return parent_cells_[c]; }

  const std::vector<int>& cells_around_vertex(int v) const {
    return vertex_cells_[v];
  }

  CellGeometry cell_geometry(int c) const;
  double total_area() const;

  /// Newest-vertex bisection of all marked cells with recursive closure.
  /// Every marked cell is bisected at least once; the result is conforming.
  static Mesh refine(const Mesh& mesh, const std::vector<int>& marked);
  static Mesh refine_uniform(const Mesh& mesh);

  /// Plain-text mesh format (grammar: "mesh2d 1", counts, vertices,
  /// cells, boundary facets with markers).
  void write(std::ostream& out) const;
  static Mesh read(std::istream& in);
  void write_file(const std::string& path) const;
  static Mesh read_file(const std::string& path);

  /// SVG snapshot, one path per cell, viewBox = bounding box.
  void write_svg(std::ostream& out) const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<std::array<int, 2>> facets_;
  std::vector<std::vector<FacetUse>> facet_cells_;
  std::vector<int> facet_markers_;
  std::vector<std::array<int, 3>> cell_facets_;
  std::vector<int> refinement_edges_;
  std::vector<int> parent_cells_;
  std::vector<std::vector<int>> vertex_cells_;
};

/// Canonical (ascending) vertex pair of an edge.
inline std::array<int, 2> canonical_edge(int a, int b) {
  return a < b ? std::array<int, 2>{a, b} : std::array<int, 2>{b, a};
}

}  // namespace goalfem
