#pragma once

#include <functional>

#include <Eigen/Core>

namespace ensflow {

using Vec2 = Eigen::Vector2d;
/// Velocity gradient: entry (c, d) is the derivative of component c along x_d.
using Mat2 = Eigen::Matrix2d;

/// Deterministic, side-effect free functions of (x, y, t).
using VectorField = std::function<Vec2(double x, double y, double t)>;
using ScalarField = std::function<double(double x, double y, double t)>;
using GradientField = std::function<Mat2(double x, double y, double t)>;

inline VectorField zero_vector_field() {
  return [](double, double, double) { return Vec2::Zero().eval(); };
}

}  // namespace ensflow
