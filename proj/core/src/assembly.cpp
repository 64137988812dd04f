#include "ensflow/assembly.hpp"

#include <vector>

#include "ensflow/quadrature.hpp"

namespace ensflow {

namespace {

using Triplet = Eigen::Triplet<double, int>;

void require_velocity_length(const TaylorHoodSpace& space, const Eigen::VectorXd& v, const char* name) {
  if (v.size() != space.n_vel())
    throw AssemblyError(std::string(name) + " has length " + std::to_string(v.size()) +
                        ", expected n_vel = " + std::to_string(space.n_vel()));
}

template <typename LocalFn>
SparseMatrix assemble_scalar(const TaylorHoodSpace& space, LocalFn&& local) {
  const int n = space.num_p2_nodes();
  std::vector<Triplet> triplets;
  triplets.reserve(36 * space.num_elements());
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const LocalMatrix Ke = local(e);
    const auto& nodes = space.p2_nodes(e);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) triplets.emplace_back(nodes[a], nodes[b], Ke(a, b));
  }
  SparseMatrix S(n, n);
  S.setFromTriplets(triplets.begin(), triplets.end());
  return S;
}

}  // namespace

LocalMatrix element_mass(const TaylorHoodSpace& space, std::size_t e) {
  LocalMatrix Me = LocalMatrix::Zero();
  const double area = space.area(e);
  for (const auto& q : triangle_rule_degree5()) {
    const auto phi = TaylorHoodSpace::p2_values(q.barycentric);
    const double w = q.weight * area;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) Me(a, b) += w * phi[a] * phi[b];
  }
  return Me;
}

LocalMatrix element_stiffness(const TaylorHoodSpace& space, std::size_t e) {
  LocalMatrix Ke = LocalMatrix::Zero();
  const double area = space.area(e);
  for (const auto& q : triangle_rule_degree5()) {
    const auto grad = space.p2_gradients(e, q.barycentric);
    const double w = q.weight * area;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) Ke(a, b) += w * grad[a].dot(grad[b]);
  }
  return Ke;
}

LocalDivergence element_divergence(const TaylorHoodSpace& space, std::size_t e) {
  LocalDivergence De = LocalDivergence::Zero();
  const double area = space.area(e);
  for (const auto& q : triangle_rule_degree5()) {
    const auto grad = space.p2_gradients(e, q.barycentric);
    const double w = q.weight * area;
    for (int i = 0; i < 3; ++i) {
      const double psi = q.barycentric[i];
      for (int k = 0; k < 6; ++k) {
        De(i, k) += w * psi * grad[k][0];
        De(i, 6 + k) += w * psi * grad[k][1];
      }
    }
  }
  return De;
}

LocalMatrix element_convection(const TaylorHoodSpace& space, std::size_t e, const Eigen::VectorXd& w) {
  // S(a, b) = (w . grad phi_b, phi_a); the skew part is taken afterwards so
  // that C = -C^T holds exactly in floating point.
  LocalMatrix S = LocalMatrix::Zero();
  const double area = space.area(e);
  for (const auto& q : triangle_rule_degree5()) {
    const auto phi = TaylorHoodSpace::p2_values(q.barycentric);
    const auto grad = space.p2_gradients(e, q.barycentric);
    const Vec2 wq = space.velocity_value(w, e, q.barycentric);
    const double weight = q.weight * area;
    std::array<double, 6> advect{};
    for (int b = 0; b < 6; ++b) advect[b] = wq.dot(grad[b]);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) S(a, b) += weight * advect[b] * phi[a];
  }
  LocalMatrix C;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) C(a, b) = 0.5 * S(a, b) - 0.5 * S(b, a);
  return C;
}

SparseMatrix assemble_scalar_mass(const TaylorHoodSpace& space) {
  return assemble_scalar(space, [&](std::size_t e) { return element_mass(space, e); });
}

SparseMatrix assemble_scalar_stiffness(const TaylorHoodSpace& space) {
  return assemble_scalar(space, [&](std::size_t e) { return element_stiffness(space, e); });
}

SparseMatrix assemble_scalar_convection(const TaylorHoodSpace& space, const Eigen::VectorXd& w) {
  require_velocity_length(space, w, "convecting velocity");
  return assemble_scalar(space, [&](std::size_t e) { return element_convection(space, e, w); });
}

SparseMatrix vector_block(const SparseMatrix& scalar) {
  const int n = static_cast<int>(scalar.rows());
  std::vector<Triplet> triplets;
  triplets.reserve(2 * scalar.nonZeros());
  for (int c = 0; c < 2; ++c)
    for (int col = 0; col < scalar.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(scalar, col); it; ++it)
        triplets.emplace_back(c * n + it.row(), c * n + it.col(), it.value());
  SparseMatrix V(2 * n, 2 * static_cast<int>(scalar.cols()));
  V.setFromTriplets(triplets.begin(), triplets.end());
  return V;
}

SparseMatrix assemble_mass(const TaylorHoodSpace& space) { return vector_block(assemble_scalar_mass(space)); }

SparseMatrix assemble_stiffness(const TaylorHoodSpace& space) {
  return vector_block(assemble_scalar_stiffness(space));
}

SparseMatrix assemble_convection(const TaylorHoodSpace& space, const Eigen::VectorXd& w) {
  return vector_block(assemble_scalar_convection(space, w));
}

SparseMatrix assemble_divergence(const TaylorHoodSpace& space) {
  std::vector<Triplet> triplets;
  triplets.reserve(36 * space.num_elements());
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const LocalDivergence De = element_divergence(space, e);
    for (int i = 0; i < 3; ++i) {
      const int row = space.pressure_dof(e, i);
      for (int k = 0; k < 6; ++k) {
        triplets.emplace_back(row, space.velocity_dof(e, k, 0), De(i, k));
        triplets.emplace_back(row, space.velocity_dof(e, k, 1), De(i, 6 + k));
      }
    }
  }
  SparseMatrix B(space.n_pr(), space.n_vel());
  B.setFromTriplets(triplets.begin(), triplets.end());
  return B;
}

Eigen::VectorXd apply_convection(const TaylorHoodSpace& space, const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& v) {
  require_velocity_length(space, w, "convecting velocity");
  require_velocity_length(space, v, "convected velocity");
  const int n = space.num_p2_nodes();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.n_vel());
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const auto& nodes = space.p2_nodes(e);
    const double area = space.area(e);
    std::array<double, 6> rx{}, ry{};
    for (const auto& q : triangle_rule_degree5()) {
      const auto phi = TaylorHoodSpace::p2_values(q.barycentric);
      const auto grad = space.p2_gradients(e, q.barycentric);
      const Vec2 wq = space.velocity_value(w, e, q.barycentric);
      const Vec2 vq = space.velocity_value(v, e, q.barycentric);
      const Mat2 Gv = space.velocity_gradient(v, e, q.barycentric);
      const Vec2 w_grad_v = Gv * wq;
      const double weight = 0.5 * q.weight * area;
      for (int a = 0; a < 6; ++a) {
        const double w_grad_phi = wq.dot(grad[a]);
        rx[a] += weight * (w_grad_v[0] * phi[a] - w_grad_phi * vq[0]);
        ry[a] += weight * (w_grad_v[1] * phi[a] - w_grad_phi * vq[1]);
      }
    }
    for (int a = 0; a < 6; ++a) {
      out[nodes[a]] += rx[a];
      out[n + nodes[a]] += ry[a];
    }
  }
  return out;
}

double trilinear_b_star(const TaylorHoodSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& w) {
  require_velocity_length(space, u, "u");
  require_velocity_length(space, v, "v");
  require_velocity_length(space, w, "w");
  double sum = 0.0;
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    double local = 0.0;
    for (const auto& q : triangle_rule_degree5()) {
      const Vec2 uq = space.velocity_value(u, e, q.barycentric);
      const Vec2 vq = space.velocity_value(v, e, q.barycentric);
      const Vec2 wq = space.velocity_value(w, e, q.barycentric);
      const Mat2 Gv = space.velocity_gradient(v, e, q.barycentric);
      const Mat2 Gw = space.velocity_gradient(w, e, q.barycentric);
      local += q.weight * (0.5 * (Gv * uq).dot(wq) - 0.5 * (Gw * uq).dot(vq));
    }
    sum += local * space.area(e);
  }
  return sum;
}

Eigen::VectorXd assemble_load(const TaylorHoodSpace& space, const VectorField& f, double t) {
  const int n = space.num_p2_nodes();
  Eigen::VectorXd F = Eigen::VectorXd::Zero(space.n_vel());
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const auto& nodes = space.p2_nodes(e);
    const double area = space.area(e);
    for (const auto& q : triangle_rule_degree5()) {
      const auto phi = TaylorHoodSpace::p2_values(q.barycentric);
      const Point x = space.map_point(e, q.barycentric);
      const Vec2 fq = f(x.x, x.y, t);
      const double w = q.weight * area;
      for (int a = 0; a < 6; ++a) {
        F[nodes[a]] += w * fq[0] * phi[a];
        F[n + nodes[a]] += w * fq[1] * phi[a];
      }
    }
  }
  return F;
}

Eigen::VectorXd pressure_mass_vector(const TaylorHoodSpace& space) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(space.n_pr());
  for (std::size_t e = 0; e < space.num_elements(); ++e)
    for (int i = 0; i < 3; ++i) m[space.pressure_dof(e, i)] += space.area(e) / 3.0;
  return m;
}

SparseMatrix couple_saddle_point(const SparseMatrix& velocity_block, const SparseMatrix& divergence) {
  const int nv = static_cast<int>(velocity_block.rows());
  const int np = static_cast<int>(divergence.rows());
  if (velocity_block.cols() != nv || divergence.cols() != nv)
    throw AssemblyError("saddle-point blocks have inconsistent dimensions");
  std::vector<Triplet> triplets;
  triplets.reserve(velocity_block.nonZeros() + 2 * divergence.nonZeros() + np);
  for (int col = 0; col < velocity_block.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(velocity_block, col); it; ++it)
      triplets.emplace_back(it.row(), it.col(), it.value());
  for (int col = 0; col < divergence.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(divergence, col); it; ++it) {
      triplets.emplace_back(nv + it.row(), it.col(), -it.value());
      triplets.emplace_back(it.col(), nv + it.row(), -it.value());
    }
  for (int i = 0; i < np; ++i) triplets.emplace_back(nv + i, nv + i, 0.0);
  SparseMatrix A(nv + np, nv + np);
  A.setFromTriplets(triplets.begin(), triplets.end());
  return A;
}

}  // namespace ensflow
