#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ensflow {

/// Malformed or inconsistent run configuration. key() and line() locate the
/// offending entry when known (empty / 0 otherwise).
class ManifestError : public std::invalid_argument {
 public:
  ManifestError(const std::string& what, std::string key = {}, int line = 0);
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

enum class Experiment { green_taylor_convergence, offset_cylinders_stability, custom };
enum class RunMode { ensemble, independent };
enum class InitialKind { green_taylor, stokes, zero };
enum class ForcingKind { green_taylor, offset_cylinders, zero };

std::string_view to_string(Experiment e);
std::string_view to_string(RunMode m);
std::string_view to_string(InitialKind k);
std::string_view to_string(ForcingKind k);
RunMode parse_run_mode(std::string_view text);

/// A fully resolved run description.
struct RunManifest {
  Experiment experiment = Experiment::custom;
  std::vector<double> nu;
  std::optional<double> mu;
  std::optional<double> epsilon;
  /// Fixed time step; when unset dt = dt_over_h * h.
  std::optional<double> dt;
  double dt_over_h = 0.4;
  double T = 1.0;

  /// Structured unit-square mesh with m cells per side, or a mesh file.
  std::optional<int> mesh_m;
  std::string mesh_file;
  /// Refinement levels of a convergence study (strictly increasing m).
  std::vector<int> mesh_sequence;

  InitialKind ic_kind = InitialKind::zero;
  /// Per-member multipliers of the initial field.
  std::vector<double> ic_scale;
  /// Viscosity of the Stokes problem giving the initial field; unset means nu_bar.
  std::optional<double> ic_stokes_nu;
  ForcingKind forcing_kind = ForcingKind::zero;
  int gt_omega = 1;
  /// Decay parameter of the vortex array; unset means 1. Members with
  /// nu_j != 1/tau are driven by the matching body force.
  std::optional<double> gt_tau;

  bool adapt_dt = false;
  RunMode mode = RunMode::ensemble;
  int parallel_members = 1;

  std::string output_dir = "out";
  bool store_fields = false;
  int vtk_every = 0;
  bool energy_bound = false;

  int members() const noexcept { return static_cast<int>(nu.size()); }
  double nu_bar() const;

  bool operator==(const RunManifest&) const = default;
};

/// Parses `key = value` lines; `#` starts a comment, lists are written
/// [a, b, c], sections use dotted keys (mesh.m, output.dir). Defaults depend
/// on the experiment kind and are filled in, so the result is complete.
RunManifest parse_config(std::string_view text);

/// Reads and parses a file; a relative mesh.file is taken relative to the
/// file's directory and must exist.
RunManifest read_config_file(const std::filesystem::path& path);

/// Text that parse_config() turns back into an equal manifest.
std::string serialize(const RunManifest& manifest);

}  // namespace ensflow
