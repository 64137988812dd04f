#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "ensflow/assembly.hpp"
#include "ensflow/dirichlet.hpp"
#include "ensflow/fields.hpp"
#include "ensflow/solver.hpp"
#include "ensflow/taylor_hood.hpp"

namespace ensflow {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inputs of one ensemble: J members differing in viscosity, initial data
/// and body force, sharing mesh, boundary data and time step.
struct EnsembleConfig {
  std::vector<double> nu;
  std::vector<VectorField> initial_conditions;
  /// Velocity coefficients used instead of interpolating initial_conditions
  /// when non-empty (for initial data that is itself a discrete solution).
  std::vector<Eigen::VectorXd> initial_coefficients;
  std::vector<VectorField> forcings;
  BoundaryData boundary = no_slip();
  double dt = 0.0;
  double T = 0.0;
  /// Stability parameters; unset values are resolved by
  /// resolve_stability_parameters().
  std::optional<double> mu;
  std::optional<double> epsilon;
  bool adapt_dt = false;
  /// Worker threads for the per-member right-hand sides and solves.
  int parallel_members = 1;
  /// Track both sides of the discrete energy estimate (costs one extra
  /// SPD solve per member and step).
  bool monitor_energy_bound = false;

  int members() const noexcept { return static_cast<int>(nu.size()); }
  /// (1/J) sum nu_j, accumulated left to right.
  double nu_bar() const;
  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// The configuration of member j run on its own (J = 1).
EnsembleConfig member_config(const EnsembleConfig& config, int j);

struct EnsembleState {
  long step = 0;
  double t = 0.0;
  std::vector<Eigen::VectorXd> velocity;
  std::vector<Eigen::VectorXd> pressure;
  Eigen::VectorXd mean_velocity;
  /// Members whose solution became non-finite or exceeded the energy limit.
  std::vector<bool> diverged;

  int members() const noexcept { return static_cast<int>(velocity.size()); }
};

/// Arithmetic mean of the member velocities.
Eigen::VectorXd ensemble_mean(const std::vector<Eigen::VectorXd>& members);

/// Mesh-dependent matrices shared by every step.
struct FlowOperators {
  explicit FlowOperators(std::shared_ptr<const TaylorHoodSpace> space);

  const TaylorHoodSpace& space() const noexcept { return *space_ptr; }

  std::shared_ptr<const TaylorHoodSpace> space_ptr;
  SparseMatrix mass;
  SparseMatrix stiffness;
  SparseMatrix divergence;
  Eigen::VectorXd pressure_mass;
};

/// Builds the coupled left-hand side
///   [[M/dt + N(u_mean) + nu_bar K, -B^T], [-B, 0]]
/// on a pattern fixed at construction. Only the values of the convection
/// part change between calls, so every returned matrix has the same pattern.
class SharedOperatorAssembler {
 public:
  explicit SharedOperatorAssembler(std::shared_ptr<const FlowOperators> ops);

  SparseMatrix build(const Eigen::VectorXd& mean_velocity, double nu_bar, double dt);

 private:
  std::shared_ptr<const FlowOperators> ops_;
  SparseMatrix static_part_;
  double cached_dt_ = -1.0;
  double cached_nu_ = -1.0;
  // For each element and local pair (a, b): value offsets of the x-x and y-y
  // velocity entries in the coupled matrix.
  std::vector<std::array<int, 72>> slots_;
};

SparseMatrix build_shared_operator(const FlowOperators& ops, const EnsembleState& state,
                                   const EnsembleConfig& config, double dt);

/// Right-hand side of member j (0-based) for the step ending at t_next:
/// velocity part F_j(t_next) + M u_j/dt - N(u_j - u_mean) u_j - (nu_j - nu_bar) K u_j,
/// pressure part zero. Boundary values are not yet applied.
Eigen::VectorXd build_member_rhs(const FlowOperators& ops, const EnsembleState& state,
                                 const EnsembleConfig& config, int j, double t_next, double dt);

}  // namespace ensflow
