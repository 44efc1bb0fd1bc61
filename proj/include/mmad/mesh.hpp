#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "mmad/types.hpp"

namespace mmad {

enum class Edge { left, right, bottom, top };

inline std::string to_string(Edge e) {
  switch (e) {
    case Edge::left: return "left";
    case Edge::right: return "right";
    case Edge::bottom: return "bottom";
    case Edge::top: return "top";
  }
  return "?";
}

inline Edge parse_edge(const std::string& s) {
  if (s == "left") return Edge::left;
  if (s == "right") return Edge::right;
  if (s == "bottom") return Edge::bottom;
  if (s == "top") return Edge::top;
  throw ConfigError("unknown edge '" + s + "'");
}

enum class RegionKind { dirichlet, neumann, interior_line };

/// A set of constrained nodes (Dirichlet / interior line) or a flux edge
/// (Neumann) together with the prescribed value profile.
template <int Dim>
struct BoundaryRegion {
  RegionKind kind = RegionKind::dirichlet;
  std::vector<int> node_ids;  // dirichlet and interior_line
  Edge edge = Edge::left;     // neumann (integration needs connectivity)
  ScalarFn<Dim> profile;      // prescribed value / flux density
  std::string label;          // for manifests
};

/// Uniform tensor-product mesh of the unit interval / unit square.
/// 2D node ids run x-fastest: id = j*(nx+1) + i.
template <int Dim>
struct StructuredMesh {
  static_assert(Dim == 1 || Dim == 2, "only 1D and 2D meshes are supported");
  static constexpr int dim = Dim;
  static constexpr int nodes_per_element = 1 << Dim;

  std::array<int, Dim> cells{};
  std::array<double, Dim> h{};
  std::vector<Point<Dim>> nodes;
  std::vector<std::array<int, nodes_per_element>> elements;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  double h_min() const { return *std::min_element(h.begin(), h.end()); }

  std::array<Point<Dim>, nodes_per_element> element_corners(int e) const {
    std::array<Point<Dim>, nodes_per_element> c;
    for (int a = 0; a < nodes_per_element; ++a) c[a] = nodes[elements[e][a]];
    return c;
  }

  Point<Dim> element_centroid(int e) const {
    Point<Dim> c = Point<Dim>::Zero();
    for (int a = 0; a < nodes_per_element; ++a) c += nodes[elements[e][a]];
    return c / nodes_per_element;
  }
};

inline StructuredMesh<1> build_interval_mesh(int nx) {
  if (nx < 1) throw ConfigError("interval mesh needs at least 1 element");
  StructuredMesh<1> m;
  m.cells = {nx};
  m.h = {1.0 / nx};
  m.nodes.resize(nx + 1);
  for (int i = 0; i <= nx; ++i) m.nodes[i][0] = static_cast<double>(i) / nx;
  m.elements.resize(nx);
  for (int e = 0; e < nx; ++e) m.elements[e] = {e, e + 1};
  return m;
}

inline StructuredMesh<2> build_grid_mesh(int nx, int ny) {
  if (nx < 1 || ny < 1) throw ConfigError("grid mesh needs at least 1 element per direction");
  StructuredMesh<2> m;
  m.cells = {nx, ny};
  m.h = {1.0 / nx, 1.0 / ny};
  m.nodes.resize((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.nodes[j * (nx + 1) + i] = Point<2>(static_cast<double>(i) / nx,
                                           static_cast<double>(j) / ny);
  m.elements.resize(nx * ny);
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      // counterclockwise corner order
      m.elements[j * nx + i] = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
  return m;
}

template <int Dim>
bool is_boundary_node(const StructuredMesh<Dim>& m, int id) {
  constexpr double tol = 1e-14;
  for (int d = 0; d < Dim; ++d)
    if (m.nodes[id][d] < tol || m.nodes[id][d] > 1.0 - tol) return true;
  return false;
}

template <int Dim>
std::vector<int> boundary_nodes(const StructuredMesh<Dim>& m) {
  std::vector<int> ids;
  for (int i = 0; i < m.n_nodes(); ++i)
    if (is_boundary_node(m, i)) ids.push_back(i);
  return ids;
}

template <int Dim>
std::vector<int> interior_nodes(const StructuredMesh<Dim>& m) {
  std::vector<int> ids;
  for (int i = 0; i < m.n_nodes(); ++i)
    if (!is_boundary_node(m, i)) ids.push_back(i);
  return ids;
}

inline std::vector<int> select_nodes(const StructuredMesh<1>& m, Edge edge) {
  if (edge == Edge::left) return {0};
  if (edge == Edge::right) return {m.n_nodes() - 1};
  throw ConfigError("edge '" + to_string(edge) + "' does not exist on a 1D mesh");
}

inline std::vector<int> select_nodes(const StructuredMesh<2>& m, Edge edge) {
  const int nx = m.cells[0], ny = m.cells[1];
  std::vector<int> ids;
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  switch (edge) {
    case Edge::left:
      for (int j = 0; j <= ny; ++j) ids.push_back(vid(0, j));
      break;
    case Edge::right:
      for (int j = 0; j <= ny; ++j) ids.push_back(vid(nx, j));
      break;
    case Edge::bottom:
      for (int i = 0; i <= nx; ++i) ids.push_back(vid(i, 0));
      break;
    case Edge::top:
      for (int i = 0; i <= nx; ++i) ids.push_back(vid(i, ny));
      break;
  }
  return ids;
}

/// Nodes within `tol` of the segment [a, b], ascending ids. Off-grid
/// segments simply select nothing; endpoints must lie in the domain.
template <int Dim>
std::vector<int> select_nodes(const StructuredMesh<Dim>& m, const Point<Dim>& a,
                              const Point<Dim>& b, double tol) {
  if (tol < 0) throw ConfigError("negative selection tolerance");
  for (const auto* p : {&a, &b})
    for (int d = 0; d < Dim; ++d)
      if ((*p)[d] < -1e-12 || (*p)[d] > 1.0 + 1e-12)
        throw ConfigError("segment endpoint outside the unit domain");

  const Vec<Dim> ab = b - a;
  const double len2 = ab.squaredNorm();
  std::vector<int> ids;
  for (int i = 0; i < m.n_nodes(); ++i) {
    const Vec<Dim> ap = m.nodes[i] - a;
    double t = len2 > 0 ? ap.dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    if ((ap - t * ab).norm() <= tol) ids.push_back(i);
  }
  return ids;
}

/// Boundary faces of one edge as node pairs, for flux integration.
inline std::vector<std::array<int, 2>> boundary_faces(const StructuredMesh<2>& m, Edge edge) {
  const auto ids = select_nodes(m, edge);
  std::vector<std::array<int, 2>> faces;
  for (size_t k = 0; k + 1 < ids.size(); ++k) faces.push_back({ids[k], ids[k + 1]});
  return faces;
}

namespace detail {

inline bool on_grid_line(double c, int n, double tol) {
  for (int i = 0; i <= n; ++i)
    if (std::abs(c - static_cast<double>(i) / n) <= tol) return true;
  return false;
}

}  // namespace detail

/// Interior constraint lines must coincide with mesh lines: axis-parallel
/// with the fixed coordinate on a grid line (within 1e-12).
inline std::vector<int> select_interior_line(const StructuredMesh<2>& m, const Point<2>& a,
                                             const Point<2>& b) {
  constexpr double tol = 1e-12;
  int fixed = -1;
  if (std::abs(a[0] - b[0]) <= tol) fixed = 0;
  else if (std::abs(a[1] - b[1]) <= tol) fixed = 1;
  if (fixed < 0) throw ConfigError("interior constraint line is not axis-parallel");
  if (!detail::on_grid_line(a[fixed], m.cells[fixed], tol))
    throw ConfigError("interior constraint line does not lie on a grid line");
  auto ids = select_nodes(m, a, b, tol);
  if (ids.empty()) throw ConfigError("interior constraint line selects no nodes");
  return ids;
}

}  // namespace mmad
