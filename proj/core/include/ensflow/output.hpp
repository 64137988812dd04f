#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ensflow/experiments.hpp"
#include "ensflow/stability.hpp"

namespace ensflow {

/// Header of the energy/stability CSV:
/// step,t,member,energy,deviation_ratio,cfl_quantity,cfl_threshold,flags
void write_energy_header(std::ostream& out);

/// One line per member; members are numbered from 1. flags is "ok" or a
/// ';'-joined subset of deviation, cfl, diverged.
void write_energy_rows(std::ostream& out, const StabilityRow& row);

std::string stability_flags(const MemberStability& member);

/// Legacy ASCII VTK of all members on quadratic triangles: point data
/// velocity_<j> and pressure_<j> (pressure interpolated linearly to edge
/// midpoints).
void write_vtk(const std::filesystem::path& path, const TaylorHoodSpace& space, const EnsembleState& state);

/// Key-value run summary: sizes, step counts, factorizations, timings and,
/// when present, the errors.
void write_run_summary(std::ostream& out, const RunManifest& manifest, const RunResult& result);

}  // namespace ensflow
