#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ensflow {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>;

/// Boundary tag values used by the built-in experiments.
inline constexpr int kOuterBoundary = 1;
inline constexpr int kInnerBoundary = 2;

struct BoundaryEdge {
  Edge nodes{};
  int tag = kOuterBoundary;

  friend bool operator==(const BoundaryEdge&, const BoundaryEdge&) = default;
};

class MeshError : public std::runtime_error {
 public:
  explicit MeshError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  /// 1-based line in the source text, 0 when not tied to a line.
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Conforming triangulation of a polygonal domain. Immutable once built.
///
/// Construction validates the topology: triangles are reoriented to
/// counterclockwise order, zero-area triangles and unreferenced nodes are
/// rejected, every edge is shared by one or two triangles, and the edges
/// used by exactly one triangle are exactly the tagged boundary edges.
class Mesh {
 public:
  Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles,
       std::vector<BoundaryEdge> boundary_edges);

  const std::vector<Point>& nodes() const noexcept { return nodes_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const noexcept { return boundary_edges_; }

  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_triangles() const noexcept { return triangles_.size(); }

  /// Maximum over triangles of the longest edge.
  double h_max() const noexcept { return h_max_; }

  double triangle_area(std::size_t t) const;
  double total_area() const;

  /// All distinct edges, each stored with the smaller node index first,
  /// sorted lexicographically.
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// For triangle t, the index into edges() of its local edge k, where local
  /// edge 0 joins vertices (0,1), edge 1 joins (1,2), edge 2 joins (2,0).
  int triangle_edge(std::size_t t, int k) const { return triangle_edges_[t][k]; }

  /// Boundary tag of edges()[e], or 0 for interior edges.
  int edge_tag(std::size_t e) const { return edge_tags_[e]; }

  /// V - E + F computed from the derived edge set (F counts triangles).
  long euler_characteristic() const;

 private:
  std::vector<Point> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<int> edge_tags_;
  double h_max_ = 0.0;
};

/// Structured mesh of (0,1)^2: m x m squares, each cut along the diagonal
/// from its lower-left to its upper-right corner. All sides carry tag 1.
Mesh build_unit_square_mesh(int m);

/// Parses the plain-text mesh format:
///
///     nodes V         followed by V lines  "x y"
///     triangles F     followed by F lines  "i j k"   (0-based)
///     boundary_edges B followed by B lines "i j tag"
///
/// Lines starting with '#' are comments.
Mesh load_mesh(std::string_view text);
Mesh read_mesh_file(const std::filesystem::path& path);

/// Inverse of load_mesh; coordinates are written with round-trip precision.
std::string serialize(const Mesh& mesh);

}  // namespace ensflow
