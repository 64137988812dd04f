#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dense_oracle.hpp"
#include "ensflow/analysis.hpp"
#include "ensflow/analytic.hpp"
#include "ensflow/assembly.hpp"
#include "ensflow/stepper.hpp"
#include "helpers.hpp"

using namespace ensflow;

namespace {

Vec2 quadratic(double x, double y, double t) { return {(1.0 + t) * (x * x - 2.0 * x * y), 0.5 - y * y + 3.0 * x * y}; }
Mat2 quadratic_gradient(double x, double y, double t) {
  Mat2 g;
  g << (1.0 + t) * (2.0 * x - 2.0 * y), (1.0 + t) * (-2.0 * x), 3.0 * y, -2.0 * y + 3.0 * x;
  return g;
}

const ExactVelocity kZero{zero_vector_field(), [](double, double, double) { return Mat2::Zero().eval(); }};

ErrorRecord record_with(std::vector<double> linf, std::vector<double> l2h1, double h) {
  ErrorRecord r;
  r.h = h;
  r.dt = 0.4 * h;
  for (std::size_t j = 0; j < linf.size(); ++j) r.members.push_back({linf[j], l2h1[j], linf[j]});
  return r;
}

}  // namespace

TEST_CASE("errors vanish when the exact field is the discrete one") {
  const auto space = testing::square_space(4);
  const ExactVelocity exact{quadratic, quadratic_gradient};
  const Eigen::VectorXd u = interpolate(*space, quadratic, 0.0);
  const ErrorSample e = velocity_error(*space, u, exact, 0.0);
  CHECK(e.l2 <= 1e-14);
  CHECK(e.h1 <= 1e-13);
  CHECK(velocity_difference(*space, u, u).l2 == 0.0);

  std::vector<std::vector<Eigen::VectorXd>> trajectory;
  std::vector<double> times;
  for (int n = 0; n <= 3; ++n) {
    times.push_back(0.1 * n);
    trajectory.push_back({interpolate(*space, quadratic, times.back()), interpolate(*space, quadratic, times.back())});
  }
  const ErrorRecord r = error_norms(*space, trajectory, times, exact, 0.25, 0.1);
  CHECK(r.samples == 4);
  for (const auto& m : r.members) {
    CHECK(m.linf_l2 <= 1e-13);
    CHECK(m.l2_h1 <= 1e-12);
  }
}

TEST_CASE("discrete norms follow their definitions") {
  ErrorAccumulator acc(1, 0.1, 0.5);
  acc.add({{0.3, 1.0}});
  acc.add({{0.1, 2.0}});
  acc.add({{0.2, 3.0}});
  const ErrorRecord r = acc.finish();
  CHECK(r.samples == 3);
  CHECK(r.members[0].linf_l2 == 0.3);
  CHECK(r.members[0].l2_h1 == doctest::Approx(std::sqrt(7.0)).epsilon(1e-15));
  CHECK(r.members[0].final_l2 == 0.2);
  CHECK_THROWS_AS(acc.add({{0.1, 0.1}, {0.2, 0.2}}), AnalysisError);
}

TEST_CASE("norms are homogeneous and satisfy the triangle inequality") {
  const auto space = testing::square_space(3);
  const int n = space->n_vel();
  std::vector<std::vector<Eigen::VectorXd>> a, b, scaled, diff;
  std::vector<double> times;
  for (int k = 0; k < 4; ++k) {
    times.push_back(0.05 * k);
    const Eigen::VectorXd x = testing::random_vector(n, 100 + k), y = testing::random_vector(n, 200 + k);
    a.push_back({x});
    b.push_back({y});
    scaled.push_back({-2.5 * x});
    diff.push_back({x - y});
  }
  const auto na = error_norms(*space, a, times, kZero, 1.0 / 3.0, 0.05).members[0];
  const auto nb = error_norms(*space, b, times, kZero, 1.0 / 3.0, 0.05).members[0];
  const auto ns = error_norms(*space, scaled, times, kZero, 1.0 / 3.0, 0.05).members[0];
  const auto nd = error_norms(*space, diff, times, kZero, 1.0 / 3.0, 0.05).members[0];
  CHECK(ns.linf_l2 == doctest::Approx(2.5 * na.linf_l2).epsilon(1e-12));
  CHECK(ns.l2_h1 == doctest::Approx(2.5 * na.l2_h1).epsilon(1e-12));
  CHECK(nd.linf_l2 <= na.linf_l2 + nb.linf_l2);
  CHECK(nd.l2_h1 <= na.l2_h1 + nb.l2_h1);
}

TEST_CASE("single-step errors agree with the dense oracle trajectory") {
  const auto space = testing::square_space(4);
  const EnsembleConfig config = testing::vortex_config({0.2, 0.3}, {1.001, 0.999}, 0.1, 1.0);
  EnsembleSimulation sim(space, config);
  const EnsembleState start = sim.initial_state();
  const EnsembleState next = sim.step(start).state;
  const oracle::DenseOperators dense = oracle::dense_operators(*space);
  const auto ref = oracle::ensemble_step(*space, dense, start.velocity, config.nu, config.forcings,
                                         analytic::green_taylor_velocity_field({}), 0.1, 0.1);
  const analytic::GreenTaylorParams params;
  const ExactVelocity exact{analytic::green_taylor_velocity_field(params), analytic::green_taylor_gradient_field(params)};
  for (int j = 0; j < 2; ++j) {
    const ErrorSample ours = velocity_error(*space, next.velocity[j], exact, 0.1);
    const ErrorSample theirs = velocity_error(*space, ref.velocity[j], exact, 0.1);
    CHECK(ours.l2 == doctest::Approx(theirs.l2).epsilon(1e-8));
    CHECK(ours.h1 == doctest::Approx(theirs.h1).epsilon(1e-8));
  }
}

TEST_CASE("kinetic energy") {
  const auto space = testing::square_space(40);
  CHECK(kinetic_energy(*space, Eigen::VectorXd::Zero(space->n_vel())) == 0.0);
  const Eigen::VectorXd u = interpolate(*space, analytic::green_taylor_velocity_field({}), 0.0);
  const double e = kinetic_energy(*space, u);
  CHECK(std::abs(e - 0.25) <= 1e-4);
  CHECK(kinetic_energy(*space, 2.0 * u) == doctest::Approx(4.0 * e).epsilon(1e-12));
  CHECK(e == doctest::Approx(0.5 * u.dot(assemble_mass(*space) * u)).epsilon(1e-12));
}

TEST_CASE("observed rates") {
  CHECK(observed_rate(0.4, 0.2, 0.1, 0.05) == doctest::Approx(1.0));
  CHECK(observed_rate(0.4, 0.1, 0.1, 0.05) == doctest::Approx(2.0));
  // Member 1, L-infinity(L2) column of the published case-1 table.
  const std::vector<double> errors{1.05e-2, 5.86e-3, 3.10e-3, 1.59e-3};
  const std::vector<double> rates{0.85, 0.92, 0.96};
  std::vector<ErrorRecord> records;
  for (std::size_t k = 0; k < errors.size(); ++k) records.push_back(record_with({errors[k]}, {1.0}, 1.0 / (20 << k)));
  const ConvergenceTable table = convergence_rates(records);
  REQUIRE(table.rows.size() == 4);
  CHECK_FALSE(table.rows[0].rate_linf_l2[0].has_value());
  // The published rates come from unrounded errors; three-digit inputs move them by < 0.01.
  for (std::size_t k = 0; k < rates.size(); ++k)
    CHECK(std::abs(*table.rows[k + 1].rate_linf_l2[0] - rates[k]) <= 0.01);
}

TEST_CASE("rates need a refining sequence") {
  CHECK_THROWS_AS(convergence_rates({record_with({1.0}, {1.0}, 0.05), record_with({0.5}, {0.5}, 0.1)}), AnalysisError);
  CHECK_THROWS_AS(convergence_rates({record_with({1.0}, {1.0}, 0.05), record_with({0.5}, {0.5}, 0.05)}), AnalysisError);
}

TEST_CASE("convergence table output") {
  const ConvergenceTable table =
      convergence_rates({record_with({0.4, 0.2}, {0.8, 0.6}, 0.05), record_with({0.2, 0.1}, {0.4, 0.15}, 0.025)});
  std::ostringstream csv;
  write_convergence_csv(csv, table);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "h_inv,member,linf_l2,rate_linf_l2,l2_h1,rate_l2_h1");
  std::getline(lines, line);
  CHECK(line.rfind("20,1,", 0) == 0);
  CHECK(line.find(",,") != std::string::npos);
  std::getline(lines, line);
  std::getline(lines, line);
  CHECK(line.rfind("40,1,", 0) == 0);
  const std::string text = format_table(table);
  CHECK(text.find("2.00e-01 (1.00)") != std::string::npos);
  CHECK(text.find("1.50e-01 (2.00)") != std::string::npos);
}
