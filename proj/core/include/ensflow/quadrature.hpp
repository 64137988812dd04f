#pragma once

#include <array>

namespace ensflow {

/// One point of a rule on the reference triangle, given in barycentric
/// coordinates; weights sum to 1, so an integral over a triangle of area A
/// is A * sum(w_q f(x_q)).
struct QuadraturePoint {
  std::array<double, 3> barycentric;
  double weight;
};

/// Seven-point rule exact for polynomials of total degree <= 5.
const std::array<QuadraturePoint, 7>& triangle_rule_degree5();

}  // namespace ensflow
