#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ensflow/fields.hpp"
#include "ensflow/taylor_hood.hpp"

namespace ensflow {

class AnalysisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact velocity with its gradient, evaluated at quadrature points.
struct ExactVelocity {
  VectorField value;
  GradientField gradient;
};

/// L2 norm and H1 seminorm of one error field at one time.
struct ErrorSample {
  double l2 = 0.0;
  double h1 = 0.0;
};

/// Error of the discrete field u against the exact field at time t, by
/// degree-5 quadrature on every element.
ErrorSample velocity_error(const TaylorHoodSpace& space, const Eigen::VectorXd& u, const ExactVelocity& exact,
                           double t);
/// Norms of the difference of two discrete fields.
ErrorSample velocity_difference(const TaylorHoodSpace& space, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& reference);

struct MemberErrors {
  /// max over 0 <= n <= N of ||e^n||.
  double linf_l2 = 0.0;
  /// (sum over 0 <= n <= N of ||grad e^n||^2 dt)^(1/2).
  double l2_h1 = 0.0;
  /// ||e^N||.
  double final_l2 = 0.0;
};

struct ErrorRecord {
  double h = 0.0;
  double dt = 0.0;
  /// Number of samples accumulated (N + 1).
  long samples = 0;
  std::vector<MemberErrors> members;
};

/// Streams per-step error samples into an ErrorRecord so trajectories need
/// not be stored.
class ErrorAccumulator {
 public:
  ErrorAccumulator(int members, double h, double dt);

  /// Adds the samples of step n for every member.
  void add(const std::vector<ErrorSample>& samples);
  const ErrorRecord& record() const noexcept { return record_; }
  /// The record with the root of the H1 sum taken.
  ErrorRecord finish() const;

 private:
  ErrorRecord record_;
  std::vector<double> h1_sum_;
};

/// Errors of a stored trajectory, trajectory[n][j] being member j at
/// times[n]. Every member is compared with the same exact field.
ErrorRecord error_norms(const TaylorHoodSpace& space, const std::vector<std::vector<Eigen::VectorXd>>& trajectory,
                        const std::vector<double>& times, const ExactVelocity& exact, double h, double dt);

/// 1/2 (M u, u), computed by quadrature.
double kinetic_energy(const TaylorHoodSpace& space, const Eigen::VectorXd& u);

struct ConvergenceRow {
  double h = 0.0;
  std::vector<MemberErrors> errors;
  /// Rates against the previous row; empty on the first row.
  std::vector<std::optional<double>> rate_linf_l2;
  std::vector<std::optional<double>> rate_l2_h1;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  int members() const noexcept { return rows.empty() ? 0 : static_cast<int>(rows.front().errors.size()); }
};

/// Observed rate between two refinement levels.
double observed_rate(double error_coarse, double error_fine, double h_coarse, double h_fine);

/// Rates between consecutive records; h must strictly decrease.
ConvergenceTable convergence_rates(const std::vector<ErrorRecord>& records);

/// Aligned text in the layout of the published tables: one row per mesh,
/// per member the L-infinity(L2) and L2(H1) errors with rates in brackets.
std::string format_table(const ConvergenceTable& table);

/// Columns h_inv, member, linf_l2, rate_linf_l2, l2_h1, rate_l2_h1; members
/// are numbered from 1, missing rates are left empty.
void write_convergence_csv(std::ostream& out, const ConvergenceTable& table);

}  // namespace ensflow
