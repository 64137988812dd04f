#include "ensflow/experiments.hpp"

#include <string>

#include "ensflow/analytic.hpp"

namespace ensflow {

namespace {

std::string context(const RunManifest& manifest, int m) {
  std::string where = std::string(to_string(manifest.experiment));
  if (!manifest.mesh_file.empty())
    where += " on " + manifest.mesh_file;
  else
    where += " on m = " + std::to_string(m);
  return where + " (" + std::string(to_string(manifest.mode)) + " mode)";
}

analytic::GreenTaylorParams vortex_params(const RunManifest& manifest) {
  analytic::GreenTaylorParams p;
  p.omega = manifest.gt_omega;
  p.tau = manifest.gt_tau ? *manifest.gt_tau : 1.0;
  return p;
}

bool has_exact_solution(const RunManifest& manifest) {
  return manifest.ic_kind == InitialKind::green_taylor && manifest.forcing_kind == ForcingKind::green_taylor;
}

}  // namespace

std::shared_ptr<const Mesh> manifest_mesh(const RunManifest& manifest, int m) {
  if (!manifest.mesh_file.empty()) return std::make_shared<const Mesh>(read_mesh_file(manifest.mesh_file));
  return std::make_shared<const Mesh>(build_unit_square_mesh(m));
}

double mesh_parameter(const RunManifest& manifest, const Mesh& mesh, int m) {
  return manifest.mesh_file.empty() ? 1.0 / m : mesh.h_max();
}

double time_step(const RunManifest& manifest, double h) { return manifest.dt ? *manifest.dt : manifest.dt_over_h * h; }

EnsembleConfig build_ensemble_config(const RunManifest& manifest, const TaylorHoodSpace& space, double dt) {
  const int J = manifest.members();
  EnsembleConfig config;
  config.nu = manifest.nu;
  config.dt = dt;
  config.T = manifest.T;
  config.mu = manifest.mu;
  config.epsilon = manifest.epsilon;
  config.adapt_dt = manifest.adapt_dt;
  config.parallel_members = manifest.parallel_members;
  config.monitor_energy_bound = manifest.energy_bound;

  const auto params = vortex_params(manifest);
  switch (manifest.ic_kind) {
    case InitialKind::green_taylor:
      for (int j = 0; j < J; ++j) {
        auto scaled = params;
        scaled.perturbation = manifest.ic_scale[j];
        config.initial_conditions.push_back(analytic::green_taylor_initial_field(scaled));
      }
      break;
    case InitialKind::stokes: {
      const double nu = manifest.ic_stokes_nu ? *manifest.ic_stokes_nu : manifest.nu_bar();
      const Eigen::VectorXd u0 = analytic::stokes_initial_condition(space, nu, analytic::offset_cylinder_forcing_field());
      for (int j = 0; j < J; ++j) config.initial_coefficients.push_back(manifest.ic_scale[j] * u0);
      break;
    }
    case InitialKind::zero:
      config.initial_conditions.assign(J, zero_vector_field());
      break;
  }

  for (int j = 0; j < J; ++j) {
    switch (manifest.forcing_kind) {
      case ForcingKind::green_taylor:
        config.forcings.push_back(analytic::green_taylor_forcing_field(params, manifest.nu[j]));
        break;
      case ForcingKind::offset_cylinders:
        config.forcings.push_back(analytic::offset_cylinder_forcing_field());
        break;
      case ForcingKind::zero:
        config.forcings.push_back(zero_vector_field());
        break;
    }
  }

  config.boundary = manifest.ic_kind == InitialKind::green_taylor
                        ? boundary_from_field(analytic::green_taylor_velocity_field(params))
                        : no_slip();
  return config;
}

ExactVelocity green_taylor_exact(const RunManifest& manifest) {
  const auto params = vortex_params(manifest);
  return {analytic::green_taylor_velocity_field(params), analytic::green_taylor_gradient_field(params)};
}

RunResult run_manifest(const RunManifest& manifest, int m, const StepHook& hook) {
  RunResult result;
  result.m = m;
  try {
    auto mesh = manifest_mesh(manifest, m);
    auto space = std::make_shared<const TaylorHoodSpace>(mesh);
    auto ops = std::make_shared<const FlowOperators>(space);
    result.h = mesh_parameter(manifest, *mesh, m);
    result.dt = time_step(manifest, result.h);
    result.dofs = space->n_total();
    const EnsembleConfig config = build_ensemble_config(manifest, *space, result.dt);
    const int J = config.members();

    std::optional<ErrorAccumulator> errors;
    std::optional<ExactVelocity> exact;
    if (has_exact_solution(manifest)) {
      errors.emplace(J, result.h, result.dt);
      exact = green_taylor_exact(manifest);
    }

    auto observer = [&](const EnsembleState& state, const StabilityRow& row) {
      result.times.push_back(state.t);
      std::vector<double> energy(J);
      for (int j = 0; j < J; ++j) energy[j] = row.members[j].energy;
      result.energies.push_back(std::move(energy));
      if (errors) {
        std::vector<ErrorSample> samples(J);
        for (int j = 0; j < J; ++j) samples[j] = velocity_error(*space, state.velocity[j], *exact, state.t);
        errors->add(samples);
      }
      if (manifest.store_fields) result.trajectory.push_back(state);
      if (hook) hook(m, *space, state, row);
    };

    if (manifest.mode == RunMode::ensemble) {
      EnsembleSimulation sim(ops, config);
      result.summary = run_ensemble(sim, observer);
    } else {
      result.summary = run_independent(ops, config, observer);
    }
    if (errors) result.errors = errors->finish();
  } catch (const std::exception& err) {
    throw RunError(context(manifest, m) + ": " + err.what());
  }
  return result;
}

StudyResult run_green_taylor_study(const RunManifest& manifest, const StepHook& hook) {
  if (!has_exact_solution(manifest))
    throw RunError("a convergence study needs the vortex initial data and forcing");
  std::vector<int> levels = manifest.mesh_sequence;
  if (levels.empty() && manifest.mesh_m) levels = {*manifest.mesh_m};
  if (levels.empty()) throw RunError("no mesh levels to study");

  StudyResult study;
  study.mode = manifest.mode;
  std::vector<ErrorRecord> records;
  for (int m : levels) {
    study.levels.push_back(run_manifest(manifest, m, hook));
    records.push_back(*study.levels.back().errors);
  }
  study.table = convergence_rates(records);
  return study;
}

RunResult run_offset_cylinders(const RunManifest& manifest, const StepHook& hook) {
  if (manifest.mesh_file.empty()) throw RunError("the offset-cylinder experiment needs mesh.file");
  return run_manifest(manifest, 0, hook);
}

}  // namespace ensflow
