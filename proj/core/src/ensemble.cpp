#include "ensflow/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ensflow/quadrature.hpp"

namespace ensflow {

double EnsembleConfig::nu_bar() const {
  if (nu.empty()) throw ConfigError("ensemble has no members");
  double sum = 0.0;
  for (double v : nu) sum += v;
  return sum / static_cast<double>(nu.size());
}

void EnsembleConfig::validate() const {
  const std::size_t J = nu.size();
  if (J == 0) throw ConfigError("ensemble needs at least one member");
  if (initial_coefficients.empty() && initial_conditions.size() != J)
    throw ConfigError("expected " + std::to_string(J) + " initial conditions, got " +
                      std::to_string(initial_conditions.size()));
  if (!initial_coefficients.empty() && initial_coefficients.size() != J)
    throw ConfigError("expected " + std::to_string(J) + " initial coefficient vectors, got " +
                      std::to_string(initial_coefficients.size()));
  if (forcings.size() != J)
    throw ConfigError("expected " + std::to_string(J) + " forcings, got " + std::to_string(forcings.size()));
  for (std::size_t j = 0; j < J; ++j) {
    if (!(nu[j] > 0.0) || !std::isfinite(nu[j]))
      throw ConfigError("viscosity of member " + std::to_string(j) + " must be positive");
    if ((initial_coefficients.empty() && !initial_conditions[j]) || !forcings[j])
      throw ConfigError("member " + std::to_string(j) + " has an empty field function");
  }
  if (!boundary) throw ConfigError("boundary data is empty");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(T >= dt)) throw ConfigError("final time T must be at least dt");
  if (mu && !(*mu >= 0.0 && *mu < 1.0)) throw ConfigError("mu must lie in [0, 1)");
  if (epsilon && !(*epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (parallel_members < 1) throw ConfigError("parallel_members must be at least 1");
}

EnsembleConfig member_config(const EnsembleConfig& config, int j) {
  if (j < 0 || j >= config.members())
    throw std::out_of_range("member index " + std::to_string(j) + " out of range");
  EnsembleConfig single = config;
  single.nu = {config.nu[j]};
  if (!config.initial_conditions.empty()) single.initial_conditions = {config.initial_conditions[j]};
  if (!config.initial_coefficients.empty()) single.initial_coefficients = {config.initial_coefficients[j]};
  single.forcings = {config.forcings[j]};
  single.mu.reset();
  single.epsilon.reset();
  single.parallel_members = 1;
  return single;
}

Eigen::VectorXd ensemble_mean(const std::vector<Eigen::VectorXd>& members) {
  if (members.empty()) throw ConfigError("cannot average an empty ensemble");
  Eigen::VectorXd sum = members.front();
  for (std::size_t j = 1; j < members.size(); ++j) sum += members[j];
  return sum / static_cast<double>(members.size());
}

FlowOperators::FlowOperators(std::shared_ptr<const TaylorHoodSpace> space)
    : space_ptr(std::move(space)),
      mass(assemble_mass(*space_ptr)),
      stiffness(assemble_stiffness(*space_ptr)),
      divergence(assemble_divergence(*space_ptr)),
      pressure_mass(pressure_mass_vector(*space_ptr)) {}

namespace {

int value_offset(const SparseMatrix& A, int row, int col) {
  const int* inner = A.innerIndexPtr();
  const int begin = A.outerIndexPtr()[col];
  const int end = A.outerIndexPtr()[col + 1];
  const int* it = std::lower_bound(inner + begin, inner + end, row);
  if (it == inner + end || *it != row)
    throw AssemblyError("entry (" + std::to_string(row) + "," + std::to_string(col) + ") missing from pattern");
  return static_cast<int>(it - inner);
}

SparseMatrix static_coupled(const FlowOperators& ops, double nu_bar, double dt) {
  const SparseMatrix velocity = (1.0 / dt) * ops.mass + nu_bar * ops.stiffness;
  return couple_saddle_point(velocity, ops.divergence);
}

}  // namespace

SharedOperatorAssembler::SharedOperatorAssembler(std::shared_ptr<const FlowOperators> ops)
    : ops_(std::move(ops)) {
  static_part_ = static_coupled(*ops_, 1.0, 1.0);
  cached_dt_ = cached_nu_ = 1.0;
  const TaylorHoodSpace& space = ops_->space();
  slots_.resize(space.num_elements());
  for (std::size_t e = 0; e < space.num_elements(); ++e)
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
          slots_[e][36 * c + 6 * a + b] =
              value_offset(static_part_, space.velocity_dof(e, a, c), space.velocity_dof(e, b, c));
}

SparseMatrix SharedOperatorAssembler::build(const Eigen::VectorXd& mean_velocity, double nu_bar, double dt) {
  const TaylorHoodSpace& space = ops_->space();
  if (mean_velocity.size() != space.n_vel())
    throw AssemblyError("mean velocity has length " + std::to_string(mean_velocity.size()) + ", expected " +
                        std::to_string(space.n_vel()));
  if (dt != cached_dt_ || nu_bar != cached_nu_) {
    SparseMatrix fresh = static_coupled(*ops_, nu_bar, dt);
    if (fresh.nonZeros() != static_part_.nonZeros())
      throw AssemblyError("static operator pattern changed");
    static_part_ = std::move(fresh);
    cached_dt_ = dt;
    cached_nu_ = nu_bar;
  }
  SparseMatrix A = static_part_;
  double* values = A.valuePtr();
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const LocalMatrix C = element_convection(space, e, mean_velocity);
    const auto& slot = slots_[e];
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        values[slot[6 * a + b]] += C(a, b);
        values[slot[36 + 6 * a + b]] += C(a, b);
      }
  }
  return A;
}

SparseMatrix build_shared_operator(const FlowOperators& ops, const EnsembleState& state,
                                   const EnsembleConfig& config, double dt) {
  // Non-owning handle: the assembler does not outlive this call.
  std::shared_ptr<const FlowOperators> handle(&ops, [](const FlowOperators*) {});
  SharedOperatorAssembler assembler(handle);
  return assembler.build(state.mean_velocity, config.nu_bar(), dt);
}

Eigen::VectorXd build_member_rhs(const FlowOperators& ops, const EnsembleState& state,
                                 const EnsembleConfig& config, int j, double t_next, double dt) {
  if (j < 0 || j >= config.members() || j >= state.members())
    throw std::out_of_range("member index " + std::to_string(j) + " out of range");
  const TaylorHoodSpace& space = ops.space();
  const Eigen::VectorXd& u = state.velocity[j];
  const double nu_bar = config.nu_bar();

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_total());
  auto velocity = rhs.head(space.n_vel());
  velocity = assemble_load(space, config.forcings[j], t_next);
  velocity += (ops.mass * u) / dt;
  const Eigen::VectorXd fluctuation = u - state.mean_velocity;
  if (fluctuation.lpNorm<Eigen::Infinity>() != 0.0) velocity -= apply_convection(space, fluctuation, u);
  const double dnu = config.nu[j] - nu_bar;
  if (dnu != 0.0) velocity -= dnu * (ops.stiffness * u);
  return rhs;
}

}  // namespace ensflow
