#include "ensflow/dirichlet.hpp"

#include <string>

namespace ensflow {

BoundaryData boundary_from_field(VectorField field) {
  return [f = std::move(field)](double x, double y, double t, int) { return f(x, y, t); };
}

BoundaryData no_slip() {
  return [](double, double, double, int) { return Vec2::Zero().eval(); };
}

ConstrainedOperator::ConstrainedOperator(const SparseMatrix& coupled, const TaylorHoodSpace& space,
                                         bool pin_pressure) {
  const int n = space.n_total();
  if (coupled.rows() != n || coupled.cols() != n)
    throw AssemblyError("coupled matrix is " + std::to_string(coupled.rows()) + "x" +
                        std::to_string(coupled.cols()) + ", expected n_total = " + std::to_string(n));
  if (!coupled.isCompressed()) throw AssemblyError("coupled matrix must be compressed");

  const int n_p2 = space.num_p2_nodes();
  for (int c = 0; c < 2; ++c)
    for (int node : space.dirichlet_nodes()) constrained_.push_back(c * n_p2 + node);
  n_velocity_constraints_ = constrained_.size();
  if (pin_pressure) {
    pinned_ = space.n_vel();
    constrained_.push_back(pinned_);
  }

  std::vector<int> slot(n, -1);
  for (std::size_t k = 0; k < constrained_.size(); ++k) slot[constrained_[k]] = static_cast<int>(k);

  matrix_ = coupled;
  std::vector<char> has_diagonal(constrained_.size(), 0);
  std::vector<Eigen::Triplet<double, int>> lift_entries;
  double* values = matrix_.valuePtr();
  const int* outer = matrix_.outerIndexPtr();
  const int* inner = matrix_.innerIndexPtr();
  for (int col = 0; col < n; ++col) {
    for (int k = outer[col]; k < outer[col + 1]; ++k) {
      const int row = inner[k];
      if (slot[row] >= 0) {
        values[k] = row == col ? 1.0 : 0.0;
        if (row == col) has_diagonal[slot[row]] = 1;
      } else if (slot[col] >= 0) {
        if (values[k] != 0.0) lift_entries.emplace_back(row, slot[col], values[k]);
        values[k] = 0.0;
      }
    }
  }
  for (std::size_t k = 0; k < constrained_.size(); ++k)
    if (!has_diagonal[k])
      throw AssemblyError("constrained unknown " + std::to_string(constrained_[k]) +
                          " has no stored diagonal entry");

  lift_.resize(n, static_cast<int>(constrained_.size()));
  lift_.setFromTriplets(lift_entries.begin(), lift_entries.end());
}

void ConstrainedOperator::lift(Eigen::Ref<Eigen::VectorXd> rhs, const Eigen::VectorXd& values) const {
  if (rhs.size() != matrix_.rows() || values.size() != static_cast<Eigen::Index>(constrained_.size()))
    throw AssemblyError("lift: dimension mismatch");
  rhs.noalias() -= lift_ * values;
  for (std::size_t k = 0; k < constrained_.size(); ++k) rhs[constrained_[k]] = values[k];
}

Eigen::VectorXd dirichlet_values(const TaylorHoodSpace& space, const ConstrainedOperator& op,
                                 const BoundaryData& g, double t) {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.constrained_dofs().size()));
  const auto& nodes = space.dirichlet_nodes();
  const std::size_t nb = nodes.size();
  for (std::size_t k = 0; k < nb; ++k) {
    const Point& p = space.p2_coordinates(nodes[k]);
    const Vec2 v = g(p.x, p.y, t, space.boundary_tag(nodes[k]));
    values[static_cast<Eigen::Index>(k)] = v[0];
    values[static_cast<Eigen::Index>(nb + k)] = v[1];
  }
  return values;
}

ConstrainedSystem apply_dirichlet(const SparseMatrix& coupled, std::vector<Eigen::VectorXd> rhs,
                                  const TaylorHoodSpace& space, const BoundaryData& g, double t,
                                  bool pin_pressure) {
  ConstrainedSystem system{ConstrainedOperator(coupled, space, pin_pressure), std::move(rhs)};
  const Eigen::VectorXd values = dirichlet_values(space, system.op, g, t);
  for (auto& b : system.rhs) system.op.lift(b, values);
  return system;
}

void shift_to_zero_mean(Eigen::Ref<Eigen::VectorXd> pressure, const Eigen::VectorXd& pressure_mass) {
  const double mean = pressure.dot(pressure_mass) / pressure_mass.sum();
  pressure.array() -= mean;
}

}  // namespace ensflow
