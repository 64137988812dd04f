// One time step of a J-member vortex ensemble: a shared operator factorized
// once against J separate linearly implicit solves.
//
//   ensflow_bench --benchmark_filter=m:40

#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "ensflow/analytic.hpp"
#include "ensflow/ensemble.hpp"
#include "ensflow/mesh.hpp"
#include "ensflow/stepper.hpp"

namespace {

using namespace ensflow;

struct Problem {
  std::shared_ptr<const FlowOperators> ops;
  EnsembleConfig config;
};

Problem make_problem(int m, int J) {
  auto mesh = std::make_shared<const Mesh>(build_unit_square_mesh(m));
  Problem p{std::make_shared<const FlowOperators>(std::make_shared<const TaylorHoodSpace>(mesh)), {}};
  const analytic::GreenTaylorParams vortex;
  p.config.dt = 0.4 / m;
  p.config.T = 1.0;
  for (int j = 0; j < J; ++j) {
    const double nu = 0.2 + 0.02 * j;
    auto perturbed = vortex;
    perturbed.perturbation = j % 2 ? 0.999 : 1.001;
    p.config.nu.push_back(nu);
    p.config.initial_conditions.push_back(analytic::green_taylor_initial_field(perturbed));
    p.config.forcings.push_back(analytic::green_taylor_forcing_field(vortex, nu));
  }
  p.config.boundary = boundary_from_field(analytic::green_taylor_velocity_field(vortex));
  return p;
}

void ensemble_step(benchmark::State& bench) {
  const Problem p = make_problem(int(bench.range(0)), int(bench.range(1)));
  EnsembleSimulation sim(p.ops, p.config);
  const EnsembleState start = sim.initial_state();
  for (auto _ : bench) benchmark::DoNotOptimize(sim.step(start, p.config.dt, p.config.dt));
}

void independent_step(benchmark::State& bench) {
  const Problem p = make_problem(int(bench.range(0)), int(bench.range(1)));
  std::vector<EnsembleSimulation> members;
  std::vector<EnsembleState> starts;
  for (int j = 0; j < p.config.members(); ++j) {
    members.emplace_back(p.ops, member_config(p.config, j));
    starts.push_back(members.back().initial_state());
  }
  for (auto _ : bench)
    for (std::size_t j = 0; j < members.size(); ++j)
      benchmark::DoNotOptimize(members[j].step(starts[j], p.config.dt, p.config.dt));
}

void sizes(benchmark::internal::Benchmark* b) {
  b->ArgNames({"m", "J"})->Unit(benchmark::kMillisecond);
  for (int m : {20, 40})
    for (int J : {1, 2, 4, 8}) b->Args({m, J});
}

}  // namespace

BENCHMARK(ensemble_step)->Apply(sizes);
BENCHMARK(independent_step)->Apply(sizes);

BENCHMARK_MAIN();
