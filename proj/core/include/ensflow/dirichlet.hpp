#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "ensflow/assembly.hpp"
#include "ensflow/fields.hpp"
#include "ensflow/taylor_hood.hpp"

namespace ensflow {

/// Velocity prescribed on boundary points; the last argument is the tag of
/// the boundary edge the point belongs to.
using BoundaryData = std::function<Vec2(double x, double y, double t, int tag)>;

/// Same field on every boundary tag.
BoundaryData boundary_from_field(VectorField field);
/// Homogeneous (no-slip) data.
BoundaryData no_slip();

/// Coupled matrix after symmetric elimination of the Dirichlet velocity DOFs
/// and (optionally) pinning of pressure DOF 0.
///
/// Constrained rows and columns become identity rows/columns; the original
/// column entries are kept in a lifting matrix so that any number of
/// right-hand sides can be adjusted for their own boundary values. The
/// sparsity pattern of the input is preserved (eliminated entries are stored
/// as explicit zeros), so repeated eliminations of matrices sharing a pattern
/// yield matrices sharing a pattern.
class ConstrainedOperator {
 public:
  ConstrainedOperator(const SparseMatrix& coupled, const TaylorHoodSpace& space, bool pin_pressure);

  const SparseMatrix& matrix() const noexcept { return matrix_; }
  /// Global indices of constrained unknowns: x-velocity DOFs, y-velocity
  /// DOFs, then the pinned pressure DOF if any.
  const std::vector<int>& constrained_dofs() const noexcept { return constrained_; }
  std::size_t num_velocity_constraints() const noexcept { return n_velocity_constraints_; }
  /// Global index of the pinned pressure unknown, or -1.
  int pinned_pressure_dof() const noexcept { return pinned_; }

  bool dirichlet_applied() const noexcept { return n_velocity_constraints_ > 0; }
  bool gauge_pinned() const noexcept { return pinned_ >= 0; }

  /// rhs <- rhs - A(:, constrained) * values, then rhs(constrained) = values.
  void lift(Eigen::Ref<Eigen::VectorXd> rhs, const Eigen::VectorXd& values) const;

 private:
  SparseMatrix matrix_;
  SparseMatrix lift_;
  std::vector<int> constrained_;
  std::size_t n_velocity_constraints_ = 0;
  int pinned_ = -1;
};

/// Values of g at time t on the constrained DOFs, in constrained_dofs()
/// order (the pinned pressure value is 0).
Eigen::VectorXd dirichlet_values(const TaylorHoodSpace& space, const ConstrainedOperator& op,
                                 const BoundaryData& g, double t);

struct ConstrainedSystem {
  ConstrainedOperator op;
  std::vector<Eigen::VectorXd> rhs;
};

/// Eliminates boundary DOFs from the coupled matrix and moves the boundary
/// values g(., t) of every right-hand side into that right-hand side.
ConstrainedSystem apply_dirichlet(const SparseMatrix& coupled, std::vector<Eigen::VectorXd> rhs,
                                  const TaylorHoodSpace& space, const BoundaryData& g, double t,
                                  bool pin_pressure = true);

/// Shifts p so that its integral (against the P1 mass vector) vanishes.
void shift_to_zero_mean(Eigen::Ref<Eigen::VectorXd> pressure, const Eigen::VectorXd& pressure_mass);

}  // namespace ensflow
