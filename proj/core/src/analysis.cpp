#include "ensflow/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "ensflow/quadrature.hpp"

namespace ensflow {

namespace {

template <typename ReferenceFn>
ErrorSample integrate_error(const TaylorHoodSpace& space, const Eigen::VectorXd& u, ReferenceFn&& reference) {
  if (u.size() != space.n_vel())
    throw AnalysisError("velocity has length " + std::to_string(u.size()) + ", expected " +
                        std::to_string(space.n_vel()));
  double l2 = 0.0;
  double h1 = 0.0;
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    double el2 = 0.0;
    double eh1 = 0.0;
    for (const auto& q : triangle_rule_degree5()) {
      const auto [value, gradient] = reference(e, q.barycentric);
      el2 += q.weight * (value - space.velocity_value(u, e, q.barycentric)).squaredNorm();
      eh1 += q.weight * (gradient - space.velocity_gradient(u, e, q.barycentric)).squaredNorm();
    }
    l2 += space.area(e) * el2;
    h1 += space.area(e) * eh1;
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

}  // namespace

ErrorSample velocity_error(const TaylorHoodSpace& space, const Eigen::VectorXd& u, const ExactVelocity& exact,
                           double t) {
  return integrate_error(space, u, [&](std::size_t e, const std::array<double, 3>& lambda) {
    const Point x = space.map_point(e, lambda);
    return std::pair<Vec2, Mat2>(exact.value(x.x, x.y, t), exact.gradient(x.x, x.y, t));
  });
}

ErrorSample velocity_difference(const TaylorHoodSpace& space, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& reference) {
  if (reference.size() != space.n_vel())
    throw AnalysisError("reference has length " + std::to_string(reference.size()) + ", expected " +
                        std::to_string(space.n_vel()));
  return integrate_error(space, u, [&](std::size_t e, const std::array<double, 3>& lambda) {
    return std::pair<Vec2, Mat2>(space.velocity_value(reference, e, lambda),
                                 space.velocity_gradient(reference, e, lambda));
  });
}

ErrorAccumulator::ErrorAccumulator(int members, double h, double dt) : h1_sum_(members, 0.0) {
  if (members < 1) throw AnalysisError("need at least one member");
  if (!(h > 0.0) || !(dt > 0.0)) throw AnalysisError("h and dt must be positive");
  record_.h = h;
  record_.dt = dt;
  record_.members.resize(members);
}

void ErrorAccumulator::add(const std::vector<ErrorSample>& samples) {
  if (samples.size() != record_.members.size())
    throw AnalysisError("expected " + std::to_string(record_.members.size()) + " samples, got " +
                        std::to_string(samples.size()));
  for (std::size_t j = 0; j < samples.size(); ++j) {
    auto& m = record_.members[j];
    m.linf_l2 = std::max(m.linf_l2, samples[j].l2);
    m.final_l2 = samples[j].l2;
    h1_sum_[j] += samples[j].h1 * samples[j].h1 * record_.dt;
    m.l2_h1 = std::sqrt(h1_sum_[j]);
  }
  ++record_.samples;
}

ErrorRecord ErrorAccumulator::finish() const { return record_; }

ErrorRecord error_norms(const TaylorHoodSpace& space, const std::vector<std::vector<Eigen::VectorXd>>& trajectory,
                        const std::vector<double>& times, const ExactVelocity& exact, double h, double dt) {
  if (trajectory.empty()) throw AnalysisError("trajectory is empty");
  if (trajectory.size() != times.size())
    throw AnalysisError("trajectory has " + std::to_string(trajectory.size()) + " steps but " +
                        std::to_string(times.size()) + " times");
  ErrorAccumulator acc(static_cast<int>(trajectory.front().size()), h, dt);
  for (std::size_t n = 0; n < trajectory.size(); ++n) {
    std::vector<ErrorSample> samples;
    for (const auto& u : trajectory[n]) samples.push_back(velocity_error(space, u, exact, times[n]));
    acc.add(samples);
  }
  return acc.finish();
}

double kinetic_energy(const TaylorHoodSpace& space, const Eigen::VectorXd& u) {
  if (u.size() != space.n_vel())
    throw AnalysisError("velocity has length " + std::to_string(u.size()) + ", expected " +
                        std::to_string(space.n_vel()));
  double sum = 0.0;
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    double local = 0.0;
    for (const auto& q : triangle_rule_degree5())
      local += q.weight * space.velocity_value(u, e, q.barycentric).squaredNorm();
    sum += space.area(e) * local;
  }
  return 0.5 * sum;
}

double observed_rate(double error_coarse, double error_fine, double h_coarse, double h_fine) {
  return std::log(error_coarse / error_fine) / std::log(h_coarse / h_fine);
}

ConvergenceTable convergence_rates(const std::vector<ErrorRecord>& records) {
  if (records.empty()) throw AnalysisError("no error records");
  const std::size_t J = records.front().members.size();
  ConvergenceTable table;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ErrorRecord& r = records[i];
    if (r.members.size() != J) throw AnalysisError("records have different member counts");
    if (i > 0 && !(r.h < records[i - 1].h))
      throw AnalysisError("mesh sizes must strictly decrease (row " + std::to_string(i) + ")");
    ConvergenceRow row;
    row.h = r.h;
    row.errors = r.members;
    row.rate_linf_l2.resize(J);
    row.rate_l2_h1.resize(J);
    if (i > 0) {
      const ErrorRecord& prev = records[i - 1];
      for (std::size_t j = 0; j < J; ++j) {
        row.rate_linf_l2[j] = observed_rate(prev.members[j].linf_l2, r.members[j].linf_l2, prev.h, r.h);
        row.rate_l2_h1[j] = observed_rate(prev.members[j].l2_h1, r.members[j].l2_h1, prev.h, r.h);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

std::string cell(double error, const std::optional<double>& rate) {
  char buf[48];
  if (rate)
    std::snprintf(buf, sizeof buf, "%.2e (%.2f)", error, *rate);
  else
    std::snprintf(buf, sizeof buf, "%.2e", error);
  return buf;
}

std::string h_inverse(double h) {
  const double inv = 1.0 / h;
  char buf[32];
  if (std::abs(inv - std::round(inv)) < 1e-9 * inv)
    std::snprintf(buf, sizeof buf, "%.0f", inv);
  else
    std::snprintf(buf, sizeof buf, "%.6g", inv);
  return buf;
}

}  // namespace

std::string format_table(const ConvergenceTable& table) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-6s", "1/h");
  out << buf;
  for (int j = 0; j < table.members(); ++j) {
    std::snprintf(buf, sizeof buf, " | %-18s %-18s", ("m" + std::to_string(j + 1) + " Linf(L2)").c_str(),
                  ("m" + std::to_string(j + 1) + " L2(H1)").c_str());
    out << buf;
  }
  out << '\n';
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof buf, "%-6s", h_inverse(row.h).c_str());
    out << buf;
    for (std::size_t j = 0; j < row.errors.size(); ++j) {
      std::snprintf(buf, sizeof buf, " | %-18s %-18s", cell(row.errors[j].linf_l2, row.rate_linf_l2[j]).c_str(),
                    cell(row.errors[j].l2_h1, row.rate_l2_h1[j]).c_str());
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table) {
  out << "h_inv,member,linf_l2,rate_linf_l2,l2_h1,rate_l2_h1\n";
  char buf[64];
  auto number = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& row : table.rows)
    for (std::size_t j = 0; j < row.errors.size(); ++j) {
      out << h_inverse(row.h) << ',' << j + 1 << ',' << number(row.errors[j].linf_l2) << ',';
      if (row.rate_linf_l2[j]) out << number(*row.rate_linf_l2[j]);
      out << ',' << number(row.errors[j].l2_h1) << ',';
      if (row.rate_l2_h1[j]) out << number(*row.rate_l2_h1[j]);
      out << '\n';
    }
}

}  // namespace ensflow
