#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ensflow/ensemble.hpp"
#include "ensflow/solver.hpp"
#include "ensflow/stability.hpp"

namespace ensflow {

struct StepResult {
  EnsembleState state;
  StabilityRow report;
  /// Some member diverged during this step.
  bool blow_up = false;
  /// The shared operator could not be built or factored; no further steps
  /// are possible.
  bool total_divergence = false;
  /// Largest relative residual of the member solves.
  double max_residual = 0.0;
};

/// Advances an ensemble with one shared factorization per step.
class EnsembleSimulation {
 public:
  EnsembleSimulation(std::shared_ptr<const TaylorHoodSpace> space, EnsembleConfig config);
  EnsembleSimulation(std::shared_ptr<const FlowOperators> ops, EnsembleConfig config);

  const EnsembleConfig& config() const noexcept { return config_; }
  const FlowOperators& operators() const noexcept { return *ops_; }
  const std::shared_ptr<const FlowOperators>& operators_ptr() const noexcept { return ops_; }
  const StabilityParameters& stability_parameters() const noexcept { return params_; }
  const DirectSolver& solver() const noexcept { return solver_; }
  DirectSolver& solver() noexcept { return solver_; }

  /// Interpolated initial data at t = 0 with zero pressures.
  EnsembleState initial_state() const;
  /// Initial energies used by the divergence test.
  void set_reference_energies(std::vector<double> energies) { reference_energy_ = std::move(energies); }

  StabilityRow check(const EnsembleState& state, double dt) const;

  StepResult step(const EnsembleState& state, double dt);
  /// As above with the end time given explicitly, so fixed-step runs land on
  /// n * dt without accumulated rounding.
  StepResult step(const EnsembleState& state, double dt, double t_next);
  StepResult step(const EnsembleState& state) { return step(state, config_.dt); }

 private:
  std::shared_ptr<const FlowOperators> ops_;
  EnsembleConfig config_;
  StabilityParameters params_;
  SharedOperatorAssembler assembler_;
  DirectSolver solver_;
  std::vector<double> reference_energy_;
};

/// Ratio of kinetic energy to its initial value beyond which a member is
/// considered diverged.
inline constexpr double kBlowupEnergyFactor = 1e10;

using StateObserver = std::function<void(const EnsembleState&, const StabilityRow&)>;

struct RunSummary {
  long steps = 0;
  double final_time = 0.0;
  bool total_divergence = false;
  /// First time each member was flagged diverged (negative if never).
  std::vector<double> blowup_time;
  std::size_t factorizations = 0;
  double max_residual = 0.0;
  double wall_seconds = 0.0;
  /// Time step actually used by each step (differs from dt only with adapt_dt).
  std::vector<double> step_sizes;
  /// Filled when EnsembleConfig::monitor_energy_bound is set.
  bool energy_bound_monitored = false;
  bool energy_bound_holds = true;
  std::vector<double> energy_bound_lhs;
  std::vector<double> energy_bound_rhs;
};

/// Runs the ensemble from its initial state to T, calling observer for the
/// initial state and after every step.
RunSummary run_ensemble(EnsembleSimulation& sim, const StateObserver& observer);

/// Runs every member as its own J = 1 ensemble in lockstep; the observer sees
/// the members assembled into one state (mean_velocity is their mean) and the
/// concatenated single-member stability rows.
RunSummary run_independent(std::shared_ptr<const FlowOperators> ops, const EnsembleConfig& config,
                           const StateObserver& observer);

}  // namespace ensflow
