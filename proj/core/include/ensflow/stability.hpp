#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "ensflow/ensemble.hpp"

namespace ensflow {

/// Resolved (mu, epsilon) and the time-step threshold they imply:
/// (2 - 2 sqrt(mu) - epsilon) sqrt(mu) / (2 (sqrt(mu) + epsilon)).
struct StabilityParameters {
  double mu = 0.0;
  double epsilon = 0.0;
  double sqrt_mu = 0.0;
  double threshold = 0.0;
};

/// Upper end of the admissible sqrt(mu) range used when mu is clamped.
inline constexpr double kMaxSqrtMu = 1.0 - 1e-9;

/// |nu_j - nu_bar| / nu_bar.
double deviation_ratio(double nu_j, double nu_bar);

double cfl_threshold(double mu, double epsilon);

/// Fills unset mu / epsilon: sqrt(mu) is the largest deviation ratio
/// (clamped below 1) and epsilon = min(0.1, 1 - sqrt(mu)). Explicit values
/// are validated: 0 <= mu < 1 and 0 < epsilon <= 2 - 2 sqrt(mu).
StabilityParameters resolve_stability_parameters(const EnsembleConfig& config);

struct MemberStability {
  double deviation_ratio = 0.0;
  /// dt / (nu_bar h_max) * ||grad(u_j - u_mean)||^2, the monitored quantity
  /// of the time-step condition with its unknown constant set to 1.
  double cfl_quantity = 0.0;
  double energy = 0.0;
  /// deviation_ratio <= sqrt(mu).
  bool deviation_ok = true;
  /// cfl_quantity > threshold (advisory).
  bool cfl_flag = false;
  bool diverged = false;
};

struct StabilityRow {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double threshold = 0.0;
  std::vector<MemberStability> members;
};

/// Kinetic energy 1/2 (M u, u).
double kinetic_energy(const SparseMatrix& mass, const Eigen::VectorXd& u);

StabilityRow check_stability(const FlowOperators& ops, const EnsembleState& state, const EnsembleConfig& config,
                             const StabilityParameters& params, double dt);

/// Time step for the next step: if any member's cfl_quantity exceeds the
/// threshold, dt * threshold / max(cfl_quantity) * 0.9, never above the
/// configured dt; otherwise the configured dt.
double adapt_dt(const StabilityRow& report, const EnsembleConfig& config);

inline constexpr double kAdaptSafetyFactor = 0.9;

/// Tracks both sides of the discrete energy estimate for every member:
///   lhs_N = 1/2 ||u^N||^2 + nu_bar dt c_j ||grad u^N||^2
///   rhs_N = sum_n dt/nu_bar ||f^{n+1}||_{-1}^2 + 1/2 ||u^0||^2 + nu_bar dt c_j ||grad u^0||^2
/// with c_j = sqrt(mu)/2 (2 + eps)/(sqrt(mu) + eps) - |nu_j - nu_bar| / (2 nu_bar).
/// The dual norm is evaluated on the discrete space (restricted to DOFs
/// vanishing on the boundary).
class EnergyBoundMonitor {
 public:
  EnergyBoundMonitor(std::shared_ptr<const FlowOperators> ops, const EnsembleConfig& config,
                     const StabilityParameters& params, const EnsembleState& initial);

  /// Records the state reached at t after a step of size dt.
  void observe(const EnsembleState& state, double dt);

  const std::vector<double>& lhs() const noexcept { return lhs_; }
  const std::vector<double>& rhs() const noexcept { return rhs_; }
  /// lhs <= rhs held for every member at every observed step.
  bool holds() const noexcept { return holds_; }

  double dual_norm_squared(const Eigen::VectorXd& load) const;

 private:
  double weighted_gradient(int j, const Eigen::VectorXd& u, double dt) const;

  std::shared_ptr<const FlowOperators> ops_;
  EnsembleConfig config_;
  std::vector<double> c_;
  std::vector<int> interior_;
  Eigen::SimplicialLDLT<SparseMatrix> interior_stiffness_;
  std::vector<double> forcing_sum_;
  std::vector<double> initial_energy_;
  std::vector<Eigen::VectorXd> initial_velocity_;
  std::vector<double> lhs_;
  std::vector<double> rhs_;
  bool holds_ = true;
};

}  // namespace ensflow
