#include "ensflow/taylor_hood.hpp"

#include <algorithm>

namespace ensflow {

TaylorHoodSpace::TaylorHoodSpace(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  const Mesh& m = *mesh_;
  const int n_vertices = static_cast<int>(m.num_nodes());
  n_p2_ = n_vertices + static_cast<int>(m.edges().size());

  p2_coords_ = m.nodes();
  p2_coords_.reserve(n_p2_);
  for (const auto& edge : m.edges()) {
    const Point& a = m.nodes()[edge[0]];
    const Point& b = m.nodes()[edge[1]];
    p2_coords_.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
  }

  element_p2_.resize(m.num_triangles());
  area_.resize(m.num_triangles());
  grad_lambda_.resize(m.num_triangles());
  for (std::size_t e = 0; e < m.num_triangles(); ++e) {
    const auto& tri = m.triangles()[e];
    auto& nodes = element_p2_[e];
    for (int k = 0; k < 3; ++k) {
      nodes[k] = tri[k];
      nodes[3 + k] = n_vertices + m.triangle_edge(e, k);
    }
    const Point& p0 = m.nodes()[tri[0]];
    const Point& p1 = m.nodes()[tri[1]];
    const Point& p2 = m.nodes()[tri[2]];
    const double area = m.triangle_area(e);
    const double inv2a = 1.0 / (2.0 * area);
    area_[e] = area;
    grad_lambda_[e] = {Vec2((p1.y - p2.y) * inv2a, (p2.x - p1.x) * inv2a),
                       Vec2((p2.y - p0.y) * inv2a, (p0.x - p2.x) * inv2a),
                       Vec2((p0.y - p1.y) * inv2a, (p1.x - p0.x) * inv2a)};
  }

  boundary_tag_.assign(n_p2_, 0);
  for (std::size_t e = 0; e < m.edges().size(); ++e) {
    const int tag = m.edge_tag(e);
    if (tag == 0) continue;
    const auto& edge = m.edges()[e];
    boundary_tag_[n_vertices + static_cast<int>(e)] = tag;
    for (int v : edge)
      boundary_tag_[v] = boundary_tag_[v] == 0 ? tag : std::min(boundary_tag_[v], tag);
  }
  for (int node = 0; node < n_p2_; ++node)
    if (boundary_tag_[node] != 0) dirichlet_nodes_.push_back(node);
}

Point TaylorHoodSpace::map_point(std::size_t e, const std::array<double, 3>& lambda) const {
  const auto& tri = mesh_->triangles()[e];
  Point p;
  for (int k = 0; k < 3; ++k) {
    p.x += lambda[k] * mesh_->nodes()[tri[k]].x;
    p.y += lambda[k] * mesh_->nodes()[tri[k]].y;
  }
  return p;
}

std::array<double, TaylorHoodSpace::kLocalP2> TaylorHoodSpace::p2_values(
    const std::array<double, 3>& l) {
  return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
          4.0 * l[0] * l[1],         4.0 * l[1] * l[2],         4.0 * l[2] * l[0]};
}

std::array<Vec2, TaylorHoodSpace::kLocalP2> TaylorHoodSpace::p2_gradients(
    std::size_t e, const std::array<double, 3>& l) const {
  const auto& g = grad_lambda_[e];
  return {(4.0 * l[0] - 1.0) * g[0],
          (4.0 * l[1] - 1.0) * g[1],
          (4.0 * l[2] - 1.0) * g[2],
          4.0 * (l[1] * g[0] + l[0] * g[1]),
          4.0 * (l[2] * g[1] + l[1] * g[2]),
          4.0 * (l[0] * g[2] + l[2] * g[0])};
}

Vec2 TaylorHoodSpace::velocity_value(const Eigen::VectorXd& u, std::size_t e,
                                     const std::array<double, 3>& lambda) const {
  const auto phi = p2_values(lambda);
  const auto& nodes = element_p2_[e];
  Vec2 v = Vec2::Zero();
  for (int k = 0; k < kLocalP2; ++k) {
    v[0] += phi[k] * u[nodes[k]];
    v[1] += phi[k] * u[n_p2_ + nodes[k]];
  }
  return v;
}

Mat2 TaylorHoodSpace::velocity_gradient(const Eigen::VectorXd& u, std::size_t e,
                                        const std::array<double, 3>& lambda) const {
  const auto grad = p2_gradients(e, lambda);
  const auto& nodes = element_p2_[e];
  Mat2 G = Mat2::Zero();
  for (int k = 0; k < kLocalP2; ++k) {
    G.row(0) += u[nodes[k]] * grad[k].transpose();
    G.row(1) += u[n_p2_ + nodes[k]] * grad[k].transpose();
  }
  return G;
}

Eigen::VectorXd interpolate(const TaylorHoodSpace& space, const VectorField& f, double t) {
  const int n = space.num_p2_nodes();
  Eigen::VectorXd u(space.n_vel());
  for (int node = 0; node < n; ++node) {
    const Point& p = space.p2_coordinates(node);
    const Vec2 value = f(p.x, p.y, t);
    u[node] = value[0];
    u[n + node] = value[1];
  }
  return u;
}

Eigen::VectorXd interpolate_pressure(const TaylorHoodSpace& space, const ScalarField& f, double t) {
  Eigen::VectorXd p(space.n_pr());
  const auto& nodes = space.mesh().nodes();
  for (int v = 0; v < space.n_pr(); ++v) p[v] = f(nodes[v].x, nodes[v].y, t);
  return p;
}

}  // namespace ensflow
