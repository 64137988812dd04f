#include "ensflow/analytic.hpp"

#include <cmath>
#include <numbers>

#include "ensflow/assembly.hpp"
#include "ensflow/solver.hpp"

namespace ensflow::analytic {

namespace {

struct VortexTerms {
  double a;       // omega * pi
  double decay;   // exp(-2 a^2 t / tau)
  double cx, sx, cy, sy;
};

VortexTerms vortex_terms(double x, double y, double t, const GreenTaylorParams& params) {
  const double a = params.omega * std::numbers::pi;
  return {a, std::exp(-2.0 * a * a * t / params.tau), std::cos(a * x), std::sin(a * x), std::cos(a * y),
          std::sin(a * y)};
}

}  // namespace

FlowSample green_taylor(double x, double y, double t, const GreenTaylorParams& params) {
  const auto v = vortex_terms(x, y, t, params);
  const double two_a = 2.0 * v.a;
  const double pressure = -0.25 * (std::cos(two_a * x) + std::cos(two_a * y)) * v.decay * v.decay;
  return {Vec2(-v.cx * v.sy * v.decay, v.sx * v.cy * v.decay), pressure};
}

Mat2 green_taylor_gradient(double x, double y, double t, const GreenTaylorParams& params) {
  const auto v = vortex_terms(x, y, t, params);
  const double s = v.a * v.decay;
  Mat2 G;
  G << s * v.sx * v.sy, -s * v.cx * v.cy,
       s * v.cx * v.cy, -s * v.sx * v.sy;
  return G;
}

Vec2 green_taylor_forcing(double x, double y, double t, const GreenTaylorParams& params, double nu) {
  const auto v = vortex_terms(x, y, t, params);
  const Vec2 u(-v.cx * v.sy * v.decay, v.sx * v.cy * v.decay);
  const Vec2 u_t = (-2.0 * v.a * v.a / params.tau) * u;
  const Vec2 laplacian = (-2.0 * v.a * v.a) * u;
  const Vec2 advection = green_taylor_gradient(x, y, t, params) * u;
  const double two_a = 2.0 * v.a;
  const double e2 = v.decay * v.decay;
  const Vec2 grad_p(0.5 * v.a * std::sin(two_a * x) * e2, 0.5 * v.a * std::sin(two_a * y) * e2);
  return u_t + advection - nu * laplacian + grad_p;
}

Vec2 offset_cylinder_forcing(double x, double y) {
  const double r = 1.0 - x * x - y * y;
  return {-6.0 * y * r, 6.0 * x * r};
}

VectorField green_taylor_velocity_field(const GreenTaylorParams& params) {
  return [params](double x, double y, double t) { return green_taylor(x, y, t, params).velocity; };
}

VectorField green_taylor_initial_field(const GreenTaylorParams& params) {
  return [params](double x, double y, double t) {
    return (params.perturbation * green_taylor(x, y, t, params).velocity).eval();
  };
}

GradientField green_taylor_gradient_field(const GreenTaylorParams& params) {
  return [params](double x, double y, double t) { return green_taylor_gradient(x, y, t, params); };
}

ScalarField green_taylor_pressure_field(const GreenTaylorParams& params) {
  return [params](double x, double y, double t) { return green_taylor(x, y, t, params).pressure; };
}

VectorField green_taylor_forcing_field(const GreenTaylorParams& params, double nu) {
  return [params, nu](double x, double y, double t) { return green_taylor_forcing(x, y, t, params, nu); };
}

VectorField offset_cylinder_forcing_field() {
  return [](double x, double y, double) { return offset_cylinder_forcing(x, y); };
}

Eigen::VectorXd stokes_initial_condition(const TaylorHoodSpace& space, double nu, const VectorField& forcing,
                                         const BoundaryData& boundary) {
  const SparseMatrix K = assemble_stiffness(space);
  const SparseMatrix B = assemble_divergence(space);
  const SparseMatrix coupled = couple_saddle_point(nu * K, B);

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_total());
  rhs.head(space.n_vel()) = assemble_load(space, forcing, 0.0);
  auto system = apply_dirichlet(coupled, {rhs}, space, boundary, 0.0);
  const FactorizedSystem fact = factorize(system.op);
  const Eigen::VectorXd x = fact.solve(system.rhs.front());
  return x.head(space.n_vel());
}

}  // namespace ensflow::analytic
