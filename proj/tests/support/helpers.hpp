#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "ensflow/analytic.hpp"
#include "ensflow/ensemble.hpp"
#include "ensflow/mesh.hpp"
#include "ensflow/taylor_hood.hpp"

namespace testing {

inline std::shared_ptr<const ensflow::TaylorHoodSpace> square_space(int m) {
  return std::make_shared<const ensflow::TaylorHoodSpace>(
      std::make_shared<const ensflow::Mesh>(ensflow::build_unit_square_mesh(m)));
}

inline Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

/// Vortex-array ensemble on the unit square: member j starts from
/// scale[j] * u0 and is driven by the forcing matching its viscosity.
inline ensflow::EnsembleConfig vortex_config(std::vector<double> nu, std::vector<double> scale, double dt, double T) {
  namespace an = ensflow::analytic;
  ensflow::EnsembleConfig config;
  config.nu = std::move(nu);
  config.dt = dt;
  config.T = T;
  const an::GreenTaylorParams params;
  for (std::size_t j = 0; j < config.nu.size(); ++j) {
    auto p = params;
    p.perturbation = scale[j];
    config.initial_conditions.push_back(an::green_taylor_initial_field(p));
    config.forcings.push_back(an::green_taylor_forcing_field(params, config.nu[j]));
  }
  config.boundary = ensflow::boundary_from_field(an::green_taylor_velocity_field(params));
  return config;
}

inline double relative_difference(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

}  // namespace testing
