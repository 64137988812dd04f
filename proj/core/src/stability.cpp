#include "ensflow/stability.hpp"

#include <algorithm>
#include <cmath>

#include "ensflow/assembly.hpp"

namespace ensflow {

double deviation_ratio(double nu_j, double nu_bar) { return std::abs(nu_j - nu_bar) / nu_bar; }

double cfl_threshold(double mu, double epsilon) {
  const double s = std::sqrt(mu);
  return (2.0 - 2.0 * s - epsilon) * s / (2.0 * (s + epsilon));
}

StabilityParameters resolve_stability_parameters(const EnsembleConfig& config) {
  StabilityParameters p;
  if (config.mu) {
    p.mu = *config.mu;
    if (!(p.mu >= 0.0 && p.mu < 1.0)) throw ConfigError("mu must lie in [0, 1)");
    p.sqrt_mu = std::sqrt(p.mu);
  } else {
    const double nu_bar = config.nu_bar();
    double largest = 0.0;
    for (double nu : config.nu) largest = std::max(largest, deviation_ratio(nu, nu_bar));
    p.sqrt_mu = std::min(largest, kMaxSqrtMu);
    p.mu = p.sqrt_mu * p.sqrt_mu;
  }
  const double eps_max = 2.0 - 2.0 * p.sqrt_mu;
  if (config.epsilon) {
    p.epsilon = *config.epsilon;
    if (!(p.epsilon > 0.0 && p.epsilon <= eps_max))
      throw ConfigError("epsilon must lie in (0, 2 - 2 sqrt(mu)]");
  } else {
    p.epsilon = std::min(0.1, 0.5 * eps_max);
  }
  p.threshold = cfl_threshold(p.mu, p.epsilon);
  return p;
}

double kinetic_energy(const SparseMatrix& mass, const Eigen::VectorXd& u) { return 0.5 * u.dot(mass * u); }

StabilityRow check_stability(const FlowOperators& ops, const EnsembleState& state, const EnsembleConfig& config,
                             const StabilityParameters& params, double dt) {
  const double nu_bar = config.nu_bar();
  const double h = ops.space().mesh().h_max();
  StabilityRow row;
  row.step = state.step;
  row.t = state.t;
  row.dt = dt;
  row.threshold = params.threshold;
  row.members.resize(state.members());
  for (int j = 0; j < state.members(); ++j) {
    auto& m = row.members[j];
    const Eigen::VectorXd d = state.velocity[j] - state.mean_velocity;
    m.deviation_ratio = deviation_ratio(config.nu[j], nu_bar);
    m.cfl_quantity = dt / (nu_bar * h) * d.dot(ops.stiffness * d);
    m.energy = kinetic_energy(ops.mass, state.velocity[j]);
    m.deviation_ok = m.deviation_ratio <= params.sqrt_mu;
    m.cfl_flag = m.cfl_quantity > params.threshold;
    m.diverged = j < static_cast<int>(state.diverged.size()) && state.diverged[j];
  }
  return row;
}

double adapt_dt(const StabilityRow& report, const EnsembleConfig& config) {
  double worst = 0.0;
  for (const auto& m : report.members)
    if (std::isfinite(m.cfl_quantity)) worst = std::max(worst, m.cfl_quantity);
  if (report.threshold <= 0.0 || worst <= report.threshold) return config.dt;
  const double proposed = report.dt * report.threshold / worst * kAdaptSafetyFactor;
  return std::min(proposed, config.dt);
}

EnergyBoundMonitor::EnergyBoundMonitor(std::shared_ptr<const FlowOperators> ops, const EnsembleConfig& config,
                                       const StabilityParameters& params, const EnsembleState& initial)
    : ops_(std::move(ops)), config_(config) {
  const TaylorHoodSpace& space = ops_->space();
  const int J = config.members();
  const double nu_bar = config.nu_bar();
  c_.resize(J);
  for (int j = 0; j < J; ++j)
    c_[j] = 0.5 * params.sqrt_mu * (2.0 + params.epsilon) / (params.sqrt_mu + params.epsilon) -
            deviation_ratio(config.nu[j], nu_bar) / 2.0;

  const int n_p2 = space.num_p2_nodes();
  std::vector<int> local(space.n_vel(), -1);
  for (int c = 0; c < 2; ++c)
    for (int node = 0; node < n_p2; ++node)
      if (!space.is_dirichlet(node)) {
        local[c * n_p2 + node] = static_cast<int>(interior_.size());
        interior_.push_back(c * n_p2 + node);
      }
  std::vector<Eigen::Triplet<double, int>> triplets;
  const SparseMatrix& K = ops_->stiffness;
  for (int col = 0; col < K.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(K, col); it; ++it)
      if (local[it.row()] >= 0 && local[it.col()] >= 0)
        triplets.emplace_back(local[it.row()], local[it.col()], it.value());
  const int ni = static_cast<int>(interior_.size());
  SparseMatrix K00(ni, ni);
  K00.setFromTriplets(triplets.begin(), triplets.end());
  interior_stiffness_.compute(K00);
  if (interior_stiffness_.info() != Eigen::Success)
    throw SolverError("interior stiffness factorization failed");

  forcing_sum_.assign(J, 0.0);
  lhs_.assign(J, 0.0);
  rhs_.assign(J, 0.0);
  initial_velocity_ = initial.velocity;
  initial_energy_.resize(J);
  for (int j = 0; j < J; ++j) initial_energy_[j] = kinetic_energy(ops_->mass, initial.velocity[j]);
}

double EnergyBoundMonitor::dual_norm_squared(const Eigen::VectorXd& load) const {
  Eigen::VectorXd restricted(static_cast<Eigen::Index>(interior_.size()));
  for (std::size_t k = 0; k < interior_.size(); ++k) restricted[static_cast<Eigen::Index>(k)] = load[interior_[k]];
  const Eigen::VectorXd z = interior_stiffness_.solve(restricted);
  return restricted.dot(z);
}

double EnergyBoundMonitor::weighted_gradient(int j, const Eigen::VectorXd& u, double dt) const {
  return config_.nu_bar() * dt * c_[j] * u.dot(ops_->stiffness * u);
}

void EnergyBoundMonitor::observe(const EnsembleState& state, double dt) {
  const TaylorHoodSpace& space = ops_->space();
  const double nu_bar = config_.nu_bar();
  for (int j = 0; j < state.members(); ++j) {
    const Eigen::VectorXd load = assemble_load(space, config_.forcings[j], state.t);
    forcing_sum_[j] += dt / nu_bar * dual_norm_squared(load);
    lhs_[j] = kinetic_energy(ops_->mass, state.velocity[j]) + weighted_gradient(j, state.velocity[j], dt);
    rhs_[j] = forcing_sum_[j] + initial_energy_[j] + weighted_gradient(j, initial_velocity_[j], dt);
    if (!(lhs_[j] <= rhs_[j])) holds_ = false;
  }
}

}  // namespace ensflow
