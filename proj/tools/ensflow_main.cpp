// ensflow: run ensemble flow experiments from a configuration file.
//
//   ensflow run   <config> [flags]   one run (first mesh level for studies)
//   ensflow study <config> [flags]   convergence study over mesh.sequence

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ensflow/analysis.hpp"
#include "ensflow/config.hpp"
#include "ensflow/experiments.hpp"
#include "ensflow/output.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config;
  std::string output;
  std::string mode;
  bool store_fields = false;
  int vtk_every = -1;
  int parallel_members = 0;
};

ensflow::RunManifest load(const Overrides& o) {
  ensflow::RunManifest m = ensflow::read_config_file(o.config);
  if (!o.output.empty()) m.output_dir = o.output;
  if (!o.mode.empty()) m.mode = ensflow::parse_run_mode(o.mode);
  if (o.store_fields) m.store_fields = true;
  if (o.vtk_every >= 0) m.vtk_every = o.vtk_every;
  if (o.parallel_members > 0) m.parallel_members = o.parallel_members;
  return m;
}

std::ofstream open_file(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Streams the energy CSV and optional VTK snapshots of one run.
class StepWriter {
 public:
  StepWriter(const ensflow::RunManifest& manifest, const fs::path& csv, const fs::path& vtk_dir)
      : manifest_(manifest), csv_(open_file(csv)), vtk_dir_(vtk_dir) {
    csv_.precision(17);
    ensflow::write_energy_header(csv_);
    if (manifest_.vtk_every > 0) fs::create_directories(vtk_dir_);
  }

  void operator()(int, const ensflow::TaylorHoodSpace& space, const ensflow::EnsembleState& state,
                  const ensflow::StabilityRow& row) {
    ensflow::write_energy_rows(csv_, row);
    if (manifest_.vtk_every > 0 && state.step % manifest_.vtk_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "step_%06ld.vtk", state.step);
      ensflow::write_vtk(vtk_dir_ / name, space, state);
    }
  }

 private:
  const ensflow::RunManifest& manifest_;
  std::ofstream csv_;
  fs::path vtk_dir_;
};

// Raw little-endian dump: steps, members, n_vel, n_pr as int64, then per
// step t followed by each member's velocity and pressure.
void write_fields(const fs::path& path, const ensflow::RunResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out || result.trajectory.empty()) return;
  const auto& first = result.trajectory.front();
  const std::int64_t header[4] = {static_cast<std::int64_t>(result.trajectory.size()), first.members(),
                                  first.velocity.front().size(), first.pressure.front().size()};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  for (const auto& state : result.trajectory) {
    out.write(reinterpret_cast<const char*>(&state.t), sizeof(double));
    for (int j = 0; j < state.members(); ++j) {
      out.write(reinterpret_cast<const char*>(state.velocity[j].data()),
                static_cast<std::streamsize>(state.velocity[j].size() * sizeof(double)));
      out.write(reinterpret_cast<const char*>(state.pressure[j].data()),
                static_cast<std::streamsize>(state.pressure[j].size() * sizeof(double)));
    }
  }
}

void report(const ensflow::RunManifest& manifest, const ensflow::RunResult& result, const fs::path& summary) {
  auto out = open_file(summary);
  ensflow::write_run_summary(out, manifest, result);
  ensflow::write_run_summary(std::cout, manifest, result);
}

int cmd_run(const Overrides& o) {
  const ensflow::RunManifest manifest = load(o);
  const fs::path dir = manifest.output_dir;
  fs::create_directories(dir);
  open_file(dir / "config.resolved") << ensflow::serialize(manifest);

  int m = 0;
  if (manifest.mesh_file.empty()) m = manifest.mesh_m ? *manifest.mesh_m : manifest.mesh_sequence.front();
  StepWriter writer(manifest, dir / "energy.csv", dir / "vtk");
  const ensflow::RunResult result =
      manifest.experiment == ensflow::Experiment::offset_cylinders_stability
          ? ensflow::run_offset_cylinders(manifest, std::ref(writer))
          : ensflow::run_manifest(manifest, m, std::ref(writer));
  report(manifest, result, dir / "summary.txt");
  if (manifest.store_fields) write_fields(dir / "fields.bin", result);
  return 0;
}

int cmd_study(const Overrides& o) {
  const ensflow::RunManifest manifest = load(o);
  const fs::path dir = manifest.output_dir;
  fs::create_directories(dir);
  open_file(dir / "config.resolved") << ensflow::serialize(manifest);

  std::vector<int> levels = manifest.mesh_sequence;
  if (levels.empty() && manifest.mesh_m) levels = {*manifest.mesh_m};
  std::vector<ensflow::ErrorRecord> records;
  for (int m : levels) {
    const std::string tag = "m" + std::to_string(m);
    StepWriter writer(manifest, dir / ("energy_" + tag + ".csv"), dir / ("vtk_" + tag));
    ensflow::RunManifest level = manifest;
    level.mesh_sequence = {m};
    const ensflow::StudyResult study = ensflow::run_green_taylor_study(level, std::ref(writer));
    const ensflow::RunResult& result = study.levels.front();
    std::cout << "== " << tag << '\n';
    report(manifest, result, dir / ("summary_" + tag + ".txt"));
    if (manifest.store_fields) write_fields(dir / ("fields_" + tag + ".bin"), result);
    records.push_back(*result.errors);
  }
  const ensflow::ConvergenceTable table = ensflow::convergence_rates(records);
  auto csv = open_file(dir / "convergence.csv");
  ensflow::write_convergence_csv(csv, table);
  const std::string text = ensflow::format_table(table);
  open_file(dir / "convergence.txt") << text;
  std::cout << '\n' << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble Navier-Stokes simulations with a shared operator per step"};
  app.require_subcommand(1);
  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", o.config, "Configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", o.output, "Output directory (overrides output.dir)");
    sub->add_option("--mode", o.mode, "ensemble or independent")
        ->check(CLI::IsMember({"ensemble", "independent"}));
    sub->add_flag("--store-fields", o.store_fields, "Keep every state and write it to fields.bin");
    sub->add_option("--vtk-every", o.vtk_every, "Write a VTK snapshot every N steps (0 disables)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--parallel-members", o.parallel_members, "Threads for per-member work")
        ->check(CLI::PositiveNumber);
  };
  CLI::App* run = app.add_subcommand("run", "Run one configuration");
  CLI::App* study = app.add_subcommand("study", "Convergence study over mesh.sequence");
  add_common(run);
  add_common(study);
  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(o);
    return cmd_study(o);
  } catch (const ensflow::ManifestError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
