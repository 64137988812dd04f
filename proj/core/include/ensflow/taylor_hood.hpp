#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "ensflow/fields.hpp"
#include "ensflow/mesh.hpp"

namespace ensflow {

/// Continuous P2 velocity / P1 pressure pair on a triangulation.
///
/// Scalar P2 nodes are numbered vertices first (node v == mesh vertex v),
/// then one node per mesh edge at its midpoint. A velocity coefficient
/// vector stores all x-components followed by all y-components, so the
/// velocity DOF of (node, component) is component * num_p2_nodes() + node.
/// Pressure DOFs coincide with mesh vertices.
///
/// Local P2 numbering on a triangle: 0..2 are the vertices, 3 the midpoint of
/// edge (0,1), 4 of (1,2), 5 of (2,0).
class TaylorHoodSpace {
 public:
  static constexpr int kLocalP2 = 6;
  static constexpr int kLocalP1 = 3;

  explicit TaylorHoodSpace(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const noexcept { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const noexcept { return mesh_; }

  std::size_t num_elements() const noexcept { return mesh_->num_triangles(); }
  int num_p2_nodes() const noexcept { return n_p2_; }
  int n_vel() const noexcept { return 2 * n_p2_; }
  int n_pr() const noexcept { return static_cast<int>(mesh_->num_nodes()); }
  int n_total() const noexcept { return n_vel() + n_pr(); }

  /// Global scalar P2 node of local node k on element e.
  int p2_node(std::size_t e, int k) const { return element_p2_[e][k]; }
  const std::array<int, kLocalP2>& p2_nodes(std::size_t e) const { return element_p2_[e]; }
  int velocity_dof(std::size_t e, int k, int component) const {
    return component * n_p2_ + element_p2_[e][k];
  }
  int pressure_dof(std::size_t e, int k) const { return mesh_->triangles()[e][k]; }

  const Point& p2_coordinates(int node) const { return p2_coords_[node]; }

  /// True when the P2 node lies on a tagged boundary edge.
  bool is_dirichlet(int node) const { return boundary_tag_[node] != 0; }
  int boundary_tag(int node) const { return boundary_tag_[node]; }
  /// Dirichlet P2 nodes in increasing order.
  const std::vector<int>& dirichlet_nodes() const noexcept { return dirichlet_nodes_; }

  double area(std::size_t e) const { return area_[e]; }
  /// Gradients of the three barycentric coordinates on element e (constant).
  const std::array<Vec2, 3>& barycentric_gradients(std::size_t e) const { return grad_lambda_[e]; }

  /// Physical coordinates of a point given in barycentric coordinates.
  Point map_point(std::size_t e, const std::array<double, 3>& lambda) const;

  /// P2 basis values at a barycentric point.
  static std::array<double, kLocalP2> p2_values(const std::array<double, 3>& lambda);
  /// P2 basis gradients at a barycentric point of element e.
  std::array<Vec2, kLocalP2> p2_gradients(std::size_t e, const std::array<double, 3>& lambda) const;

  /// Velocity value and gradient of the finite element field with
  /// coefficients u at a barycentric point of element e.
  Vec2 velocity_value(const Eigen::VectorXd& u, std::size_t e, const std::array<double, 3>& lambda) const;
  Mat2 velocity_gradient(const Eigen::VectorXd& u, std::size_t e,
                         const std::array<double, 3>& lambda) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  int n_p2_ = 0;
  std::vector<std::array<int, kLocalP2>> element_p2_;
  std::vector<Point> p2_coords_;
  std::vector<int> boundary_tag_;
  std::vector<int> dirichlet_nodes_;
  std::vector<double> area_;
  std::vector<std::array<Vec2, 3>> grad_lambda_;
};

/// Nodal P2 interpolant of a velocity field at time t.
Eigen::VectorXd interpolate(const TaylorHoodSpace& space, const VectorField& f, double t);

/// Nodal P1 interpolant of a scalar field at time t.
Eigen::VectorXd interpolate_pressure(const TaylorHoodSpace& space, const ScalarField& f, double t);

}  // namespace ensflow
