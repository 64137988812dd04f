#pragma once

#include <Eigen/Core>

#include "ensflow/dirichlet.hpp"
#include "ensflow/fields.hpp"
#include "ensflow/taylor_hood.hpp"

namespace ensflow::analytic {

/// Decaying vortex array on (0,1)^2. The decay parameter tau plays the role of
/// the Reynolds number: with viscosity 1/tau the field solves the unforced
/// Navier-Stokes equations.
struct GreenTaylorParams {
  int omega = 1;
  double tau = 1.0;
  /// Multiplier applied to the initial condition only (1 +/- 1e-3 in the
  /// ensemble convergence study).
  double perturbation = 1.0;
};

struct FlowSample {
  Vec2 velocity;
  double pressure;
};

/// Velocity and pressure of the vortex array at (x, y, t).
FlowSample green_taylor(double x, double y, double t, const GreenTaylorParams& params);
Mat2 green_taylor_gradient(double x, double y, double t, const GreenTaylorParams& params);

/// u_t + u.grad u - nu lap u + grad p for the vortex array: the body force
/// under which it is an exact solution for viscosity nu. Vanishes (to
/// round-off) when nu == 1/tau.
Vec2 green_taylor_forcing(double x, double y, double t, const GreenTaylorParams& params, double nu);

/// Rotational body force (-6y(1-x^2-y^2), 6x(1-x^2-y^2)) driving the flow
/// between offset cylinders.
Vec2 offset_cylinder_forcing(double x, double y);

// Field adapters for the solver interfaces.
VectorField green_taylor_velocity_field(const GreenTaylorParams& params);
/// Exact velocity times params.perturbation.
VectorField green_taylor_initial_field(const GreenTaylorParams& params);
GradientField green_taylor_gradient_field(const GreenTaylorParams& params);
ScalarField green_taylor_pressure_field(const GreenTaylorParams& params);
VectorField green_taylor_forcing_field(const GreenTaylorParams& params, double nu);
VectorField offset_cylinder_forcing_field();

/// Velocity part of the steady Stokes solution nu K u - B^T p = (f, v),
/// B u = 0 with the given boundary data (no-slip by default).
Eigen::VectorXd stokes_initial_condition(const TaylorHoodSpace& space, double nu, const VectorField& forcing,
                                         const BoundaryData& boundary = no_slip());

}  // namespace ensflow::analytic
