#include "ensflow/output.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

namespace ensflow {

namespace {

std::string num(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void write_energy_header(std::ostream& out) {
  out << "step,t,member,energy,deviation_ratio,cfl_quantity,cfl_threshold,flags\n";
}

std::string stability_flags(const MemberStability& member) {
  std::string flags;
  auto add = [&](const char* f) { flags += (flags.empty() ? "" : ";") + std::string(f); };
  if (!member.deviation_ok) add("deviation");
  if (member.cfl_flag) add("cfl");
  if (member.diverged) add("diverged");
  return flags.empty() ? "ok" : flags;
}

void write_energy_rows(std::ostream& out, const StabilityRow& row) {
  for (std::size_t j = 0; j < row.members.size(); ++j) {
    const auto& m = row.members[j];
    out << row.step << ',' << num(row.t) << ',' << j + 1 << ',' << num(m.energy) << ',' << num(m.deviation_ratio)
        << ',' << num(m.cfl_quantity) << ',' << num(row.threshold) << ',' << stability_flags(m) << '\n';
  }
}

void write_vtk(const std::filesystem::path& path, const TaylorHoodSpace& space, const EnsembleState& state) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const int n = space.num_p2_nodes();
  const Mesh& mesh = space.mesh();
  out << "# vtk DataFile Version 3.0\nensemble step " << state.step << " t = " << num(state.t)
      << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n << " double\n";
  for (int i = 0; i < n; ++i) {
    const Point& p = space.p2_coordinates(i);
    out << num(p.x) << ' ' << num(p.y) << " 0\n";
  }
  const std::size_t cells = space.num_elements();
  out << "CELLS " << cells << ' ' << cells * 7 << '\n';
  for (std::size_t e = 0; e < cells; ++e) {
    out << 6;
    for (int node : space.p2_nodes(e)) out << ' ' << node;
    out << '\n';
  }
  out << "CELL_TYPES " << cells << '\n';
  for (std::size_t e = 0; e < cells; ++e) out << "22\n";

  out << "POINT_DATA " << n << '\n';
  const auto& edges = mesh.edges();
  const int V = static_cast<int>(mesh.num_nodes());
  for (int j = 0; j < state.members(); ++j) {
    const Eigen::VectorXd& u = state.velocity[j];
    out << "VECTORS velocity_" << j + 1 << " double\n";
    for (int i = 0; i < n; ++i) out << num(u[i]) << ' ' << num(u[n + i]) << " 0\n";
    const Eigen::VectorXd& p = state.pressure[j];
    out << "SCALARS pressure_" << j + 1 << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < V; ++i) out << num(p[i]) << '\n';
    for (const auto& edge : edges) out << num(0.5 * (p[edge[0]] + p[edge[1]])) << '\n';
  }
}

void write_run_summary(std::ostream& out, const RunManifest& manifest, const RunResult& result) {
  const RunSummary& s = result.summary;
  out << "experiment = " << to_string(manifest.experiment) << '\n';
  out << "mode = " << to_string(manifest.mode) << '\n';
  out << "members = " << manifest.members() << '\n';
  if (manifest.mesh_file.empty())
    out << "mesh.m = " << result.m << '\n';
  else
    out << "mesh.file = " << manifest.mesh_file << '\n';
  out << "h = " << num(result.h) << '\n';
  out << "dt = " << num(result.dt) << '\n';
  out << "dofs = " << result.dofs << '\n';
  out << "steps = " << s.steps << '\n';
  out << "final_time = " << num(s.final_time) << '\n';
  out << "factorizations = " << s.factorizations << '\n';
  out << "factorizations_per_step = " << (s.steps > 0 ? num(double(s.factorizations) / double(s.steps)) : "0")
      << '\n';
  out << "wall_seconds = " << num(s.wall_seconds) << '\n';
  out << "wall_seconds_per_step = " << (s.steps > 0 ? num(s.wall_seconds / double(s.steps)) : "0") << '\n';
  out << "max_residual = " << num(s.max_residual) << '\n';
  out << "total_divergence = " << (s.total_divergence ? "true" : "false") << '\n';
  for (std::size_t j = 0; j < s.blowup_time.size(); ++j)
    out << "blowup_time." << j + 1 << " = " << (s.blowup_time[j] < 0.0 ? "none" : num(s.blowup_time[j])) << '\n';
  if (s.energy_bound_monitored) {
    out << "energy_bound.holds = " << (s.energy_bound_holds ? "true" : "false") << '\n';
    for (std::size_t j = 0; j < s.energy_bound_lhs.size(); ++j)
      out << "energy_bound." << j + 1 << " = " << num(s.energy_bound_lhs[j]) << " <= "
          << num(s.energy_bound_rhs[j]) << '\n';
  }
  if (result.errors)
    for (std::size_t j = 0; j < result.errors->members.size(); ++j) {
      const auto& e = result.errors->members[j];
      out << "error." << j + 1 << ".linf_l2 = " << num(e.linf_l2) << '\n';
      out << "error." << j + 1 << ".l2_h1 = " << num(e.l2_h1) << '\n';
      out << "error." << j + 1 << ".final_l2 = " << num(e.final_l2) << '\n';
    }
}

}  // namespace ensflow
