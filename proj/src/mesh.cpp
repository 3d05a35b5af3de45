#include "goalfem/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace goalfem {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                (c.x() - a.x()) * (b.y() - a.y()));
}

std::string shortest_repr(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

Eigen::Vector3d CellGeometry::barycentric(const Vec2& x) const {
  Vec2 ref = to_reference(x);
  return {1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
}

Vec2 CellGeometry::grad_lambda(int i) const {
  // lambda = (1 - xi - eta, xi, eta); grad in physical coords via Jinv^T.
  Vec2 ref_grad;
  switch (i) {
    case 0: ref_grad = {-1.0, -1.0}; break;
    case 1: ref_grad = {1.0, 0.0}; break;
    default: ref_grad = {0.0, 1.0}; break;
  }
  return jac_inv.transpose() * ref_grad;
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells,
           std::map<std::array<int, 2>, int> boundary_markers,
           std::vector<int> refinement_edges, std::vector<int> parent_cells)
    : vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      refinement_edges_(std::move(refinement_edges)),
      parent_cells_(std::move(parent_cells)) {
  const int nc = num_cells();
  const int nv = num_vertices();

  for (int c = 0; c < nc; ++c) {
    for (int v : cells_[c]) {
      if (v < 0 || v >= nv)
        throw std::runtime_error("mesh: cell vertex index out of range");
    }
    const Vec2& a = vertices_[cells_[c][0]];
    const Vec2& b = vertices_[cells_[c][1]];
    const Vec2& d = vertices_[cells_[c][2]];
    double area = signed_area(a, b, d);
    double bbox = (std::max({a.x(), b.x(), d.x()}) - std::min({a.x(), b.x(), d.x()})) *
                  (std::max({a.y(), b.y(), d.y()}) - std::min({a.y(), b.y(), d.y()}));
    if (area < 1e-14 * std::max(bbox, 1e-300))
      throw std::runtime_error("mesh: degenerate or CW cell " + std::to_string(c));
  }

  // Facets: canonical pairs in lexicographic order.
  std::map<std::array<int, 2>, std::vector<FacetUse>> edge_map;
  for (int c = 0; c < nc; ++c) {
    for (int e = 0; e < 3; ++e) {
      auto key = canonical_edge(cells_[c][(e + 1) % 3], cells_[c][(e + 2) % 3]);
      edge_map[key].push_back({c, e});
    }
  }
  cell_facets_.assign(nc, {-1, -1, -1});
  for (auto& [key, uses] : edge_map) {
    if (uses.size() > 2)
      throw std::runtime_error("mesh: non-manifold facet (more than 2 incident cells)");
    std::sort(uses.begin(), uses.end(),
              [](const FacetUse& a, const FacetUse& b) { return a.cell < b.cell; });
    int f = static_cast<int>(facets_.size());
    facets_.push_back(key);
    facet_cells_.push_back(uses);
    for (const FacetUse& u : uses) cell_facets_[u.cell][u.local_edge] = f;
  }

  facet_markers_.assign(facets_.size(), -1);
  for (int f = 0; f < num_facets(); ++f) {
    auto it = boundary_markers.find(facets_[f]);
    if (facet_on_boundary(f)) {
      if (it == boundary_markers.end())
        throw std::runtime_error("mesh: boundary facet without marker");
      facet_markers_[f] = it->second;
      boundary_markers.erase(it);
    } else if (it != boundary_markers.end()) {
      throw std::runtime_error("mesh: marker on interior facet");
    }
  }
  if (!boundary_markers.empty())
    throw std::runtime_error("mesh: marker references nonexistent facet");

  if (refinement_edges_.empty()) {
    // Longest edge, ties broken by lowest canonical vertex pair.
    refinement_edges_.resize(nc);
    for (int c = 0; c < nc; ++c) {
      int best = 0;
      double best_len = -1.0;
      std::array<int, 2> best_key{};
      for (int e = 0; e < 3; ++e) {
        auto key = canonical_edge(cells_[c][(e + 1) % 3], cells_[c][(e + 2) % 3]);
        double len = (vertices_[key[0]] - vertices_[key[1]]).norm();
        if (len > best_len + 1e-14 * (len + best_len) ||
            (std::abs(len - best_len) <= 1e-14 * (len + best_len) && key < best_key)) {
          best = e;
          best_len = len;
          best_key = key;
        }
      }
      refinement_edges_[c] = best;
    }
  } else if (static_cast<int>(refinement_edges_.size()) != nc) {
    throw std::runtime_error("mesh: refinement edge list size mismatch");
  }

  if (parent_cells_.empty()) {
    parent_cells_.resize(nc);
    for (int c = 0; c < nc; ++c) parent_cells_[c] = c;
  }

  vertex_cells_.assign(nv, {});
  for (int c = 0; c < nc; ++c)
    for (int v : cells_[c]) vertex_cells_[v].push_back(c);
}

CellGeometry Mesh::cell_geometry(int c) const {
  CellGeometry g;
  for (int i = 0; i < 3; ++i) g.v[i] = vertices_[cells_[c][i]];
  g.jac.col(0) = g.v[1] - g.v[0];
  g.jac.col(1) = g.v[2] - g.v[0];
  double det = g.jac.determinant();
  g.area = 0.5 * det;
  if (g.area <= 0.0) throw std::runtime_error("mesh: degenerate cell geometry");
  g.jac_inv = g.jac.inverse();
  for (int e = 0; e < 3; ++e) {
    Vec2 a = g.v[(e + 1) % 3];
    Vec2 b = g.v[(e + 2) % 3];
    Vec2 t = b - a;
    g.edge_length[e] = t.norm();
    // Outward: rotate tangent by -90 degrees (CCW cell).
    g.normal[e] = Vec2(t.y(), -t.x()) / g.edge_length[e];
  }
  return g;
}

double Mesh::total_area() const {
  double area = 0.0;
  for (int c = 0; c < num_cells(); ++c) {
    area += signed_area(vertices_[cells_[c][0]], vertices_[cells_[c][1]],
                        vertices_[cells_[c][2]]);
  }
  return area;
}

namespace {

// Mutable working state for newest-vertex bisection with recursive closure.
struct RefineWork {
  std::vector<Vec2> verts;
  std::vector<std::array<int, 3>> cells;
  std::vector<int> refedge;
  std::vector<int> root;
  std::vector<char> alive;
  std::map<std::array<int, 2>, std::vector<int>> edge_cells;
  std::map<std::array<int, 2>, int> midpoint;
  std::map<std::array<int, 2>, int> bmarkers;
  int depth_guard = 0;

  std::array<int, 2> cell_edge(int t, int e) const {
    return canonical_edge(cells[t][(e + 1) % 3], cells[t][(e + 2) % 3]);
  }

  void remove_from_edges(int t) {
    for (int e = 0; e < 3; ++e) {
      auto& list = edge_cells[cell_edge(t, e)];
      list.erase(std::remove(list.begin(), list.end(), t), list.end());
    }
  }

  void add_to_edges(int t) {
    for (int e = 0; e < 3; ++e) edge_cells[cell_edge(t, e)].push_back(t);
  }

  int get_midpoint(const std::array<int, 2>& key) {
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    int m = static_cast<int>(verts.size());
    verts.push_back(0.5 * (verts[key[0]] + verts[key[1]]));
    midpoint.emplace(key, m);
    auto bit = bmarkers.find(key);
    if (bit != bmarkers.end()) {
      int marker = bit->second;
      bmarkers.erase(bit);
      bmarkers.emplace(canonical_edge(key[0], m), marker);
      bmarkers.emplace(canonical_edge(m, key[1]), marker);
    }
    return m;
  }

  // Split t at the midpoint of its refinement edge. The children inherit
  // the new vertex as their newest vertex: refinement edge opposite it.
  void split(int t) {
    int e = refedge[t];
    int p = cells[t][e];
    int a = cells[t][(e + 1) % 3];
    int b = cells[t][(e + 2) % 3];
    int m = get_midpoint(canonical_edge(a, b));
    remove_from_edges(t);
    alive[t] = 0;
    int c1 = static_cast<int>(cells.size());
    cells.push_back({p, a, m});
    refedge.push_back(2);  // edge {p, a}, opposite m
    root.push_back(root[t]);
    alive.push_back(1);
    add_to_edges(c1);
    int c2 = static_cast<int>(cells.size());
    cells.push_back({p, m, b});
    refedge.push_back(1);  // edge {b, p}, opposite m
    root.push_back(root[t]);
    alive.push_back(1);
    add_to_edges(c2);
  }

  // Bisect cell t; first makes the neighbor across the refinement edge
  // compatible (its refinement edge equal to the shared edge).
  void bisect(int t) {
    if (!alive[t]) return;
    if (++depth_guard > 4 * static_cast<int>(cells.size()) + 64)
      throw std::runtime_error("mesh: refinement closure did not terminate");
    auto key = cell_edge(t, refedge[t]);
    int partner = -1;
    for (int c : edge_cells[key])
      if (c != t) partner = c;
    if (partner >= 0 && cell_edge(partner, refedge[partner]) != key) {
      bisect(partner);
      partner = -1;
      for (int c : edge_cells[key])
        if (c != t) partner = c;
    }
    split(t);
    if (partner >= 0) split(partner);
    --depth_guard;
  }
};

}  // namespace

Mesh Mesh::refine(const Mesh& mesh, const std::vector<int>& marked) {
  RefineWork w;
  w.verts.assign(mesh.vertices_.begin(), mesh.vertices_.end());
  w.cells = mesh.cells_;
  w.refedge = mesh.refinement_edges_;
  w.alive.assign(mesh.num_cells(), 1);
  w.root.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    w.root[c] = c;
    w.add_to_edges(c);
  }
  for (int f = 0; f < mesh.num_facets(); ++f)
    if (mesh.facet_on_boundary(f)) w.bmarkers[mesh.facets_[f]] = mesh.facet_markers_[f];

  std::vector<int> order = marked;
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  for (int c : order) {
    if (c < 0 || c >= mesh.num_cells())
      throw std::runtime_error("mesh: marked cell id out of range");
    w.bisect(c);
  }

  std::vector<std::array<int, 3>> new_cells;
  std::vector<int> new_refedge;
  std::vector<int> new_parent;
  for (int c = 0; c < static_cast<int>(w.cells.size()); ++c) {
    if (!w.alive[c]) continue;
    new_cells.push_back(w.cells[c]);
    new_refedge.push_back(w.refedge[c]);
    new_parent.push_back(w.root[c]);
  }
  return Mesh(std::move(w.verts), std::move(new_cells), std::move(w.bmarkers),
              std::move(new_refedge), std::move(new_parent));
}

Mesh Mesh::refine_uniform(const Mesh& mesh) {
  std::vector<int> all(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) all[c] = c;
  return refine(mesh, all);
}

void Mesh::write(std::ostream& out) const {
  int nbf = 0;
  for (int f = 0; f < num_facets(); ++f)
    if (facet_on_boundary(f)) ++nbf;
  out << "mesh2d 1\n";
  out << num_vertices() << ' ' << num_cells() << ' ' << nbf << '\n';
  for (const Vec2& v : vertices_)
    out << shortest_repr(v.x()) << ' ' << shortest_repr(v.y()) << '\n';
  for (const auto& c : cells_) out << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  for (int f = 0; f < num_facets(); ++f) {
    if (!facet_on_boundary(f)) continue;
    out << facets_[f][0] << ' ' << facets_[f][1] << ' ' << facet_markers_[f] << '\n';
  }
}

Mesh Mesh::read(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "mesh2d" || version != 1)
    throw std::runtime_error("mesh: bad file header");
  int nv = 0, nc = 0, nbf = 0;
  in >> nv >> nc >> nbf;
  std::vector<Vec2> verts(nv);
  for (auto& v : verts) in >> v.x() >> v.y();
  std::vector<std::array<int, 3>> cells(nc);
  for (auto& c : cells) in >> c[0] >> c[1] >> c[2];
  std::map<std::array<int, 2>, int> markers;
  for (int i = 0; i < nbf; ++i) {
    int a = 0, b = 0, m = 0;
    in >> a >> b >> m;
    markers[canonical_edge(a, b)] = m;
  }
  if (!in) throw std::runtime_error("mesh: truncated file");
  return Mesh(std::move(verts), std::move(cells), std::move(markers));
}

void Mesh::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("mesh: cannot open " + path);
  write(out);
}

Mesh Mesh::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("mesh: cannot open " + path);
  return read(in);
}

void Mesh::write_svg(std::ostream& out) const {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Vec2& v : vertices_) {
    xmin = std::min(xmin, v.x());
    xmax = std::max(xmax, v.x());
    ymin = std::min(ymin, v.y());
    ymax = std::max(ymax, v.y());
  }
  double w = xmax - xmin, h = ymax - ymin;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\""
      << shortest_repr(xmin) << ' ' << shortest_repr(ymin) << ' '
      << shortest_repr(w) << ' ' << shortest_repr(h) << "\">\n";
  out << "<g fill=\"none\" stroke=\"black\" stroke-width=\""
      << shortest_repr(0.002 * std::max(w, h)) << "\">\n";
  for (const auto& c : cells_) {
    out << "<path d=\"M";
    for (int i = 0; i < 3; ++i) {
      const Vec2& v = vertices_[c[i]];
      // Flip y so the picture is in the usual orientation.
      out << (i ? " L" : "") << ' ' << shortest_repr(v.x()) << ' '
          << shortest_repr(ymin + ymax - v.y());
    }
    out << " Z\"/>\n";
  }
  out << "</g>\n</svg>\n";
}

}  // namespace goalfem
