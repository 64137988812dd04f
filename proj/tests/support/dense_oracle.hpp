#pragma once

// Dense reference implementation of the Taylor-Hood operators and of one
// semi-implicit step, written without the library's assembly code: basis
// functions come from a monomial Vandermonde solve on each element, the
// matrices use a collapsed Gauss-Legendre rule, boundary conditions replace
// rows. Only meant for meshes with a few hundred unknowns.

#include <vector>

#include <Eigen/Dense>

#include "ensflow/fields.hpp"
#include "ensflow/taylor_hood.hpp"

namespace oracle {

struct DenseOperators {
  Eigen::MatrixXd mass;        // n_vel x n_vel
  Eigen::MatrixXd stiffness;   // n_vel x n_vel
  Eigen::MatrixXd divergence;  // n_pr x n_vel, (B u, q) = (div u, q)
  Eigen::VectorXd pressure_mass;
  std::vector<ensflow::Point> nodes;  // coordinates of every P2 node
  std::vector<bool> boundary;         // P2 node lies on a boundary edge
};

DenseOperators dense_operators(const ensflow::TaylorHoodSpace& space);

/// Skew convection matrix with (N(w) v, z) = 1/2 (w.grad v, z) - 1/2 (w.grad z, v).
Eigen::MatrixXd dense_convection(const ensflow::TaylorHoodSpace& space, const Eigen::VectorXd& w);

/// Load vector (f(., t), phi_i) with the 7-point degree-5 rule.
Eigen::VectorXd dense_load(const ensflow::TaylorHoodSpace& space, const ensflow::VectorField& f, double t);

Eigen::VectorXd nodal_interpolant(const DenseOperators& ops, const ensflow::VectorField& f, double t);

/// Member right-hand side F_j + M u_j/dt - N(u_j - mean) u_j - (nu_j - nu_bar) K u_j.
Eigen::VectorXd ensemble_rhs(const ensflow::TaylorHoodSpace& space, const DenseOperators& ops,
                             const std::vector<Eigen::VectorXd>& u, const std::vector<double>& nu,
                             const ensflow::VectorField& f, int j, double t_next, double dt);

struct DenseState {
  std::vector<Eigen::VectorXd> velocity;
  std::vector<Eigen::VectorXd> pressure;
};

/// One ensemble step with member forcings f[j] and Dirichlet data g. Pressure
/// is pinned at vertex 0 and then shifted to zero mean.
DenseState ensemble_step(const ensflow::TaylorHoodSpace& space, const DenseOperators& ops,
                         const std::vector<Eigen::VectorXd>& u, const std::vector<double>& nu,
                         const std::vector<ensflow::VectorField>& f, const ensflow::VectorField& g, double t_next,
                         double dt);

/// The standard linearly implicit scheme for one flow:
/// (u' - u)/dt + u.grad u' - nu lap u' + grad p' = f(t'), div u' = 0.
DenseState linearly_implicit_step(const ensflow::TaylorHoodSpace& space, const DenseOperators& ops,
                                  const Eigen::VectorXd& u, double nu, const ensflow::VectorField& f,
                                  const ensflow::VectorField& g, double t_next, double dt);

}  // namespace oracle
