#include "ensflow/stepper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

namespace ensflow {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

template <typename Fn>
void for_each_member(int J, int threads, Fn&& fn) {
  const int workers = std::min(std::max(threads, 1), J);
  if (workers <= 1) {
    for (int j = 0; j < J; ++j) fn(j);
    return;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int j = w; j < J; j += workers) fn(j);
    });
}

}  // namespace

EnsembleSimulation::EnsembleSimulation(std::shared_ptr<const TaylorHoodSpace> space, EnsembleConfig config)
    : EnsembleSimulation(std::make_shared<const FlowOperators>(std::move(space)), std::move(config)) {}

EnsembleSimulation::EnsembleSimulation(std::shared_ptr<const FlowOperators> ops, EnsembleConfig config)
    : ops_(std::move(ops)), config_(std::move(config)), assembler_(ops_) {
  config_.validate();
  params_ = resolve_stability_parameters(config_);
}

EnsembleState EnsembleSimulation::initial_state() const {
  const TaylorHoodSpace& space = ops_->space();
  EnsembleState state;
  for (int j = 0; j < config_.members(); ++j) {
    if (config_.initial_coefficients.empty()) {
      state.velocity.push_back(interpolate(space, config_.initial_conditions[j], 0.0));
    } else {
      if (config_.initial_coefficients[j].size() != space.n_vel())
        throw ConfigError("initial velocity of member " + std::to_string(j) + " has the wrong length");
      state.velocity.push_back(config_.initial_coefficients[j]);
    }
    state.pressure.push_back(Eigen::VectorXd::Zero(space.n_pr()));
  }
  state.mean_velocity = ensemble_mean(state.velocity);
  state.diverged.assign(config_.members(), false);
  return state;
}

StabilityRow EnsembleSimulation::check(const EnsembleState& state, double dt) const {
  return check_stability(*ops_, state, config_, params_, dt);
}

StepResult EnsembleSimulation::step(const EnsembleState& state, double dt) {
  return step(state, dt, state.t + dt);
}

StepResult EnsembleSimulation::step(const EnsembleState& state, double dt, double t_next) {
  const TaylorHoodSpace& space = ops_->space();
  const int J = config_.members();
  if (state.members() != J)
    throw ConfigError("state has " + std::to_string(state.members()) + " members, config has " +
                      std::to_string(J));
  if (reference_energy_.empty()) {
    reference_energy_.resize(J);
    for (int j = 0; j < J; ++j) reference_energy_[j] = kinetic_energy(ops_->mass, state.velocity[j]);
  }

  StepResult result;
  result.state.step = state.step + 1;
  result.state.t = t_next;
  result.state.diverged = state.diverged;
  result.state.diverged.resize(J, false);

  auto give_up = [&] {
    result.total_divergence = true;
    result.blow_up = true;
    result.state.velocity = state.velocity;
    result.state.pressure = state.pressure;
    result.state.mean_velocity = state.mean_velocity;
    result.state.diverged.assign(J, true);
    result.report = check(result.state, dt);
    return result;
  };
  if (!all_finite(state.mean_velocity)) return give_up();

  // One operator and one factorization per step, whatever J is.
  const SparseMatrix shared = assembler_.build(state.mean_velocity, config_.nu_bar(), dt);
  const ConstrainedOperator op(shared, space, /*pin_pressure=*/true);
  std::optional<FactorizedSystem> fact;
  try {
    fact.emplace(solver_.factorize(op, state.step));
  } catch (const SolverError&) {
    return give_up();
  }

  const Eigen::VectorXd boundary = dirichlet_values(space, op, config_.boundary, t_next);
  std::vector<Eigen::VectorXd> rhs(J);
  for_each_member(J, config_.parallel_members, [&](int j) {
    rhs[j] = build_member_rhs(*ops_, state, config_, j, t_next, dt);
    op.lift(rhs[j], boundary);
  });

  const std::vector<Eigen::VectorXd> solutions = solve_multi(*fact, rhs, config_.parallel_members);

  result.state.velocity.resize(J);
  result.state.pressure.resize(J);
  for (int j = 0; j < J; ++j) {
    const Eigen::VectorXd& x = solutions[j];
    result.state.velocity[j] = x.head(space.n_vel());
    result.state.pressure[j] = x.tail(space.n_pr());
    const bool finite = all_finite(x);
    if (finite) {
      shift_to_zero_mean(result.state.pressure[j], ops_->pressure_mass);
      result.max_residual = std::max(result.max_residual, relative_residual(op.matrix(), x, rhs[j]));
    }
    const double energy = finite ? kinetic_energy(ops_->mass, result.state.velocity[j])
                                 : std::numeric_limits<double>::infinity();
    const double limit = kBlowupEnergyFactor * std::max(reference_energy_[j], std::numeric_limits<double>::min());
    if (!finite || !(energy <= limit)) {
      if (!result.state.diverged[j]) result.blow_up = true;
      result.state.diverged[j] = true;
    }
  }
  result.state.mean_velocity = ensemble_mean(result.state.velocity);
  result.report = check(result.state, dt);
  return result;
}

namespace {

long planned_steps(const EnsembleConfig& config) {
  return std::max<long>(1, std::lround(config.T / config.dt));
}

}  // namespace

RunSummary run_ensemble(EnsembleSimulation& sim, const StateObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  const EnsembleConfig& config = sim.config();
  const std::size_t factorizations_before = sim.solver().factorization_count();

  RunSummary summary;
  summary.blowup_time.assign(config.members(), -1.0);

  EnsembleState state = sim.initial_state();
  std::optional<EnergyBoundMonitor> monitor;
  if (config.monitor_energy_bound)
    monitor.emplace(sim.operators_ptr(), config, sim.stability_parameters(),
                    state);

  StabilityRow row = sim.check(state, config.dt);
  if (observer) observer(state, row);

  const long fixed_steps = planned_steps(config);
  const double tol = 1e-12 * config.T;
  while (true) {
    double dt = config.dt;
    double t_next;
    if (config.adapt_dt) {
      if (state.t >= config.T - tol) break;
      dt = std::min(adapt_dt(row, config), config.T - state.t);
      t_next = state.t + dt;
      if (config.T - t_next <= tol) t_next = config.T;
    } else {
      if (state.step >= fixed_steps) break;
      t_next = static_cast<double>(state.step + 1) * config.dt;
    }

    StepResult result = sim.step(state, dt, t_next);
    summary.max_residual = std::max(summary.max_residual, result.max_residual);
    summary.step_sizes.push_back(dt);
    for (int j = 0; j < config.members(); ++j)
      if (result.state.diverged[j] && summary.blowup_time[j] < 0.0) summary.blowup_time[j] = result.state.t;
    if (result.total_divergence) {
      summary.total_divergence = true;
      break;
    }
    state = std::move(result.state);
    row = std::move(result.report);
    if (monitor) monitor->observe(state, dt);
    if (observer) observer(state, row);
  }

  summary.steps = state.step;
  summary.final_time = state.t;
  summary.factorizations = sim.solver().factorization_count() - factorizations_before;
  if (monitor) {
    summary.energy_bound_monitored = true;
    summary.energy_bound_holds = monitor->holds();
    summary.energy_bound_lhs = monitor->lhs();
    summary.energy_bound_rhs = monitor->rhs();
  }
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

RunSummary run_independent(std::shared_ptr<const FlowOperators> ops, const EnsembleConfig& config,
                           const StateObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const int J = config.members();

  std::vector<EnsembleSimulation> sims;
  sims.reserve(J);
  for (int j = 0; j < J; ++j) sims.emplace_back(ops, member_config(config, j));

  std::vector<EnsembleState> states;
  std::vector<StabilityRow> rows;
  for (auto& sim : sims) {
    states.push_back(sim.initial_state());
    rows.push_back(sim.check(states.back(), config.dt));
  }

  auto merged = [&] {
    EnsembleState all;
    all.step = states.front().step;
    all.t = states.front().t;
    StabilityRow row = rows.front();
    row.members.clear();
    for (int j = 0; j < J; ++j) {
      all.velocity.push_back(states[j].velocity.front());
      all.pressure.push_back(states[j].pressure.front());
      all.diverged.push_back(states[j].diverged.front());
      row.members.push_back(rows[j].members.front());
    }
    all.mean_velocity = ensemble_mean(all.velocity);
    return std::make_pair(std::move(all), std::move(row));
  };

  RunSummary summary;
  summary.blowup_time.assign(J, -1.0);
  if (observer) {
    auto [all, row] = merged();
    observer(all, row);
  }

  const long fixed_steps = planned_steps(config);
  const double tol = 1e-12 * config.T;
  std::vector<bool> stopped(J, false);
  while (true) {
    const EnsembleState& lead = states.front();
    double dt = config.dt;
    double t_next;
    if (config.adapt_dt) {
      if (lead.t >= config.T - tol) break;
      for (int j = 0; j < J; ++j) dt = std::min(dt, adapt_dt(rows[j], sims[j].config()));
      dt = std::min(dt, config.T - lead.t);
      t_next = lead.t + dt;
      if (config.T - t_next <= tol) t_next = config.T;
    } else {
      if (lead.step >= fixed_steps) break;
      t_next = static_cast<double>(lead.step + 1) * config.dt;
    }

    bool all_stopped = true;
    for (int j = 0; j < J; ++j) {
      if (stopped[j]) {
        // A member that can no longer be advanced keeps its last state.
        states[j].step += 1;
        states[j].t = t_next;
        continue;
      }
      StepResult result = sims[j].step(states[j], dt, t_next);
      summary.max_residual = std::max(summary.max_residual, result.max_residual);
      if (result.state.diverged.front() && summary.blowup_time[j] < 0.0) summary.blowup_time[j] = result.state.t;
      if (result.total_divergence) stopped[j] = true;
      states[j] = std::move(result.state);
      rows[j] = std::move(result.report);
      if (!stopped[j]) all_stopped = false;
    }
    summary.step_sizes.push_back(dt);
    if (all_stopped) {
      summary.total_divergence = true;
      break;
    }
    if (observer) {
      auto [all, row] = merged();
      observer(all, row);
    }
  }

  summary.steps = states.front().step;
  summary.final_time = states.front().t;
  for (const auto& sim : sims) summary.factorizations += sim.solver().factorization_count();
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

}  // namespace ensflow
