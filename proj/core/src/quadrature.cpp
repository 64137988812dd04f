#include "ensflow/quadrature.hpp"

#include <cmath>

namespace ensflow {

const std::array<QuadraturePoint, 7>& triangle_rule_degree5() {
  static const std::array<QuadraturePoint, 7> rule = [] {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0;
    const double a2 = (6.0 + s15) / 21.0;
    const double w1 = (155.0 - s15) / 1200.0;
    const double w2 = (155.0 + s15) / 1200.0;
    const double b1 = 1.0 - 2.0 * a1;
    const double b2 = 1.0 - 2.0 * a2;
    return std::array<QuadraturePoint, 7>{{
        {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0},
        {{a1, a1, b1}, w1},
        {{a1, b1, a1}, w1},
        {{b1, a1, a1}, w1},
        {{a2, a2, b2}, w2},
        {{a2, b2, a2}, w2},
        {{b2, a2, a2}, w2},
    }};
  }();
  return rule;
}

}  // namespace ensflow
