#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ensflow/analysis.hpp"
#include "ensflow/config.hpp"
#include "ensflow/ensemble.hpp"
#include "ensflow/mesh.hpp"
#include "ensflow/stepper.hpp"
#include "ensflow/taylor_hood.hpp"

namespace ensflow {

/// Failure of a run, prefixed with the experiment and mesh it came from.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mesh of a manifest: the structured square with m cells per side, or the
/// mesh file when one is given (m is then ignored).
std::shared_ptr<const Mesh> manifest_mesh(const RunManifest& manifest, int m);

/// Mesh parameter used for dt = dt_over_h * h: 1/m on generated squares,
/// the longest edge on file meshes.
double mesh_parameter(const RunManifest& manifest, const Mesh& mesh, int m);

double time_step(const RunManifest& manifest, double h);

/// Ensemble inputs described by the manifest on the given space.
EnsembleConfig build_ensemble_config(const RunManifest& manifest, const TaylorHoodSpace& space, double dt);

/// The unperturbed vortex the study errors are measured against.
ExactVelocity green_taylor_exact(const RunManifest& manifest);

/// Called with the initial state and after each step.
using StepHook = std::function<void(int m, const TaylorHoodSpace& space, const EnsembleState& state,
                                    const StabilityRow& row)>;

struct RunResult {
  int m = 0;
  double h = 0.0;
  double dt = 0.0;
  int dofs = 0;
  RunSummary summary;
  /// Present when the manifest has an exact solution (vortex problems).
  std::optional<ErrorRecord> errors;
  /// Time and per-member kinetic energy of every step, including t = 0.
  std::vector<double> times;
  std::vector<std::vector<double>> energies;
  /// Every state when the manifest asks for stored fields.
  std::vector<EnsembleState> trajectory;
};

/// One run of the manifest on mesh level m (ignored for file meshes).
RunResult run_manifest(const RunManifest& manifest, int m, const StepHook& hook = {});

struct StudyResult {
  RunMode mode = RunMode::ensemble;
  std::vector<RunResult> levels;
  ConvergenceTable table;
};

/// Runs every level of mesh.sequence (or mesh.m alone) and tabulates the
/// errors with their observed rates.
StudyResult run_green_taylor_study(const RunManifest& manifest, const StepHook& hook = {});

/// Energy trace of the three-member flow between offset cylinders; blow-up
/// is recorded in the summary, not thrown.
RunResult run_offset_cylinders(const RunManifest& manifest, const StepHook& hook = {});

}  // namespace ensflow
