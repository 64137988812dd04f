#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ensflow/assembly.hpp"
#include "ensflow/dirichlet.hpp"

namespace ensflow {

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, long pivot = -1)
      : std::runtime_error(what), pivot_(pivot) {}

  /// Column of the first zero pivot for singular matrices, otherwise -1.
  long pivot() const noexcept { return pivot_; }

 private:
  long pivot_;
};

namespace detail {
struct SymbolicHandle;
struct NumericHandle;
}  // namespace detail

/// Fill-reducing ordering and symbolic factorization of one sparsity pattern.
/// Shared by every numeric factorization of matrices with that pattern.
class SymbolicAnalysis {
 public:
  explicit SymbolicAnalysis(const SparseMatrix& pattern);

  bool matches(const SparseMatrix& matrix) const;
  Eigen::Index rows() const noexcept { return n_; }

 private:
  friend class FactorizedSystem;
  Eigen::Index n_;
  std::vector<int> outer_;
  std::vector<int> inner_;
  std::shared_ptr<detail::SymbolicHandle> handle_;
};

/// LU factorization of a square sparse matrix. Immutable; copies share the
/// factor, and solves may run concurrently.
class FactorizedSystem {
 public:
  FactorizedSystem(const SparseMatrix& matrix, std::shared_ptr<const SymbolicAnalysis> symbolic,
                   long step_index = -1);

  Eigen::Index rows() const noexcept { return matrix_->rows(); }
  long step_index() const noexcept { return step_index_; }
  const SparseMatrix& matrix() const noexcept { return *matrix_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  std::shared_ptr<const SparseMatrix> matrix_;
  std::shared_ptr<const SymbolicAnalysis> symbolic_;
  std::shared_ptr<detail::NumericHandle> numeric_;
  long step_index_;
};

/// Factorizes with a fresh symbolic analysis.
FactorizedSystem factorize(const SparseMatrix& matrix);

/// Factorizes a constrained saddle-point operator; rejects operators whose
/// boundary elimination or pressure gauge was skipped.
FactorizedSystem factorize(const ConstrainedOperator& op);

/// Solves every right-hand side with the same factorization. Each result is
/// bitwise identical to a separate fact.solve(rhs[j]).
std::vector<Eigen::VectorXd> solve_multi(const FactorizedSystem& fact, std::span<const Eigen::VectorXd> rhs,
                                         int threads = 1);

/// Relative residual ||A x - b|| / ||b|| (0 when b = 0 and A x = 0).
double relative_residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// Repeated factorization of matrices with one fixed pattern. The symbolic
/// analysis is computed on first use and reused while the pattern matches;
/// counters expose how much work was done.
class DirectSolver {
 public:
  FactorizedSystem factorize(const SparseMatrix& matrix, long step_index = -1);
  FactorizedSystem factorize(const ConstrainedOperator& op, long step_index = -1);

  std::size_t factorization_count() const noexcept { return factorizations_; }
  std::size_t symbolic_count() const noexcept { return analyses_; }
  void reset_counters() noexcept { factorizations_ = analyses_ = 0; }

 private:
  std::shared_ptr<const SymbolicAnalysis> symbolic_;
  std::size_t factorizations_ = 0;
  std::size_t analyses_ = 0;
};

}  // namespace ensflow
