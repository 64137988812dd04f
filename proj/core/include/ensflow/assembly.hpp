#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "ensflow/fields.hpp"
#include "ensflow/taylor_hood.hpp"

namespace ensflow {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using LocalMatrix = Eigen::Matrix<double, 6, 6>;
/// Rows: the three P1 pressure functions; columns: six x-velocity then six
/// y-velocity P2 functions.
using LocalDivergence = Eigen::Matrix<double, 3, 12>;

class AssemblyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Element matrices of the scalar P2 space, integrated with the degree-5 rule.
LocalMatrix element_mass(const TaylorHoodSpace& space, std::size_t e);
LocalMatrix element_stiffness(const TaylorHoodSpace& space, std::size_t e);
LocalDivergence element_divergence(const TaylorHoodSpace& space, std::size_t e);
/// Skew part of the convection matrix: entry (a, b) is
/// 1/2 (w.grad(phi_b), phi_a) - 1/2 (w.grad(phi_a), phi_b).
LocalMatrix element_convection(const TaylorHoodSpace& space, std::size_t e, const Eigen::VectorXd& w);

// Scalar P2 operators (num_p2_nodes square).
SparseMatrix assemble_scalar_mass(const TaylorHoodSpace& space);
SparseMatrix assemble_scalar_stiffness(const TaylorHoodSpace& space);
SparseMatrix assemble_scalar_convection(const TaylorHoodSpace& space, const Eigen::VectorXd& w);

/// blockdiag(S, S) acting on [x-components; y-components].
SparseMatrix vector_block(const SparseMatrix& scalar);

/// Velocity mass matrix M with (Mu, u) = ||u_h||^2.
SparseMatrix assemble_mass(const TaylorHoodSpace& space);
/// Velocity stiffness K with (Ku, u) = ||grad u_h||^2.
SparseMatrix assemble_stiffness(const TaylorHoodSpace& space);
/// n_pr x n_vel matrix B with (Bu, q) = (div u_h, q_h).
SparseMatrix assemble_divergence(const TaylorHoodSpace& space);
/// Skew-symmetric N(w) with (N(w) v, z) = b*(w_h, v_h, z_h).
SparseMatrix assemble_convection(const TaylorHoodSpace& space, const Eigen::VectorXd& w);

/// N(w) v without forming the matrix.
Eigen::VectorXd apply_convection(const TaylorHoodSpace& space, const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& v);

/// b*(u, v, w) = 1/2 (u.grad v, w) - 1/2 (u.grad w, v), by direct quadrature.
double trilinear_b_star(const TaylorHoodSpace& space, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& v, const Eigen::VectorXd& w);

/// Load vector (f(., t), phi_i) over all velocity test functions.
Eigen::VectorXd assemble_load(const TaylorHoodSpace& space, const VectorField& f, double t);

/// Integrals of the P1 pressure basis functions.
Eigen::VectorXd pressure_mass_vector(const TaylorHoodSpace& space);

/// Coupled saddle-point matrix [[A, -B^T], [-B, 0]] of size n_total. The
/// pressure diagonal is stored as explicit zeros so that gauge pinning never
/// changes the sparsity pattern.
SparseMatrix couple_saddle_point(const SparseMatrix& velocity_block, const SparseMatrix& divergence);

}  // namespace ensflow
