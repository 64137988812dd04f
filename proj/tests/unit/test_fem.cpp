#include <doctest.h>

#include <cmath>
#include <memory>

#include "dense_oracle.hpp"
#include "ensflow/analytic.hpp"
#include "ensflow/assembly.hpp"
#include "ensflow/dirichlet.hpp"
#include "ensflow/quadrature.hpp"
#include "ensflow/solver.hpp"
#include "ensflow/taylor_hood.hpp"
#include "helpers.hpp"

using namespace ensflow;

namespace {

std::shared_ptr<const TaylorHoodSpace> reference_triangle() {
  auto mesh = std::make_shared<const Mesh>(std::vector<Point>{{0, 0}, {1, 0}, {0, 1}}, std::vector<Triangle>{{0, 1, 2}},
                                           std::vector<BoundaryEdge>{{{0, 1}, 1}, {{1, 2}, 1}, {{2, 0}, 1}});
  return std::make_shared<const TaylorHoodSpace>(mesh);
}

// Unit square with interior nodes moved at random, so no two elements match.
std::shared_ptr<const TaylorHoodSpace> jittered_square(int m, std::uint64_t seed) {
  const Mesh base = build_unit_square_mesh(m);
  std::vector<Point> nodes = base.nodes();
  const Eigen::VectorXd shift = testing::random_vector(2 * Eigen::Index(nodes.size()), seed);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Point& p = nodes[i];
    if (p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0) continue;
    p.x += 0.25 / m * shift[2 * i];
    p.y += 0.25 / m * shift[2 * i + 1];
  }
  return std::make_shared<const TaylorHoodSpace>(
      std::make_shared<const Mesh>(nodes, base.triangles(), base.boundary_edges()));
}

double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

// Frozen from tests/oracles/reference_triangle.py (exact symbolic integration).
const double kMass[6][6] = {
    {0.016666666666666666, -0.002777777777777778, -0.002777777777777778, 0.0, -0.011111111111111112, 0.0},
    {-0.002777777777777778, 0.016666666666666666, -0.002777777777777778, 0.0, 0.0, -0.011111111111111112},
    {-0.002777777777777778, -0.002777777777777778, 0.016666666666666666, -0.011111111111111112, 0.0, 0.0},
    {0.0, 0.0, -0.011111111111111112, 0.08888888888888889, 0.044444444444444446, 0.044444444444444446},
    {-0.011111111111111112, 0.0, 0.0, 0.044444444444444446, 0.08888888888888889, 0.044444444444444446},
    {0.0, -0.011111111111111112, 0.0, 0.044444444444444446, 0.044444444444444446, 0.08888888888888889}};
const double kStiffness[6][6] = {
    {1.0, 0.16666666666666666, 0.16666666666666666, -0.6666666666666666, 0.0, -0.6666666666666666},
    {0.16666666666666666, 0.5, 0.0, -0.6666666666666666, 0.0, 0.0},
    {0.16666666666666666, 0.0, 0.5, 0.0, 0.0, -0.6666666666666666},
    {-0.6666666666666666, -0.6666666666666666, 0.0, 2.6666666666666665, -1.3333333333333333, 0.0},
    {0.0, 0.0, 0.0, -1.3333333333333333, 2.6666666666666665, -1.3333333333333333},
    {-0.6666666666666666, 0.0, -0.6666666666666666, 0.0, -1.3333333333333333, 2.6666666666666665}};
const double kDivergence[3][12] = {
    {-0.16666666666666666, 0.0, 0.0, 0.16666666666666666, 0.16666666666666666, -0.16666666666666666,
     -0.16666666666666666, 0.0, 0.0, -0.16666666666666666, 0.16666666666666666, 0.16666666666666666},
    {0.0, 0.16666666666666666, 0.0, -0.16666666666666666, 0.16666666666666666, -0.16666666666666666, 0.0, 0.0, 0.0,
     -0.3333333333333333, 0.3333333333333333, 0.0},
    {0.0, 0.0, 0.0, 0.0, 0.3333333333333333, -0.3333333333333333, 0.0, 0.0, 0.16666666666666666,
     -0.16666666666666666, 0.16666666666666666, -0.16666666666666666}};
// Convecting field (1 + x + y^2, xy - 1/2).
const double kConvection[6][6] = {
    {0.0, -0.04027777777777778, -0.009126984126984128, 0.09365079365079365, -0.05476190476190476,
     0.03968253968253968},
    {0.04027777777777778, 0.0, 0.03630952380952381, -0.15396825396825398, -0.12380952380952381, 0.04285714285714286},
    {0.009126984126984128, -0.03630952380952381, 0.0, -0.010317460317460317, 0.08571428571428572,
     -0.01904761904761905},
    {-0.09365079365079365, 0.15396825396825398, 0.010317460317460317, 0.0, 0.11428571428571428,
     -0.23492063492063492},
    {0.05476190476190476, 0.12380952380952381, -0.08571428571428572, -0.11428571428571428, 0.0,
     -0.3619047619047619},
    {-0.03968253968253968, -0.04285714285714286, 0.01904761904761905, 0.23492063492063492, 0.3619047619047619, 0.0}};

Vec2 convecting_field(double x, double y, double) { return {1.0 + x + y * y, x * y - 0.5}; }

}  // namespace

TEST_CASE("quadrature is exact on monomials of degree <= 5") {
  const auto& rule = triangle_rule_degree5();
  double weights = 0.0;
  for (const auto& q : rule) weights += q.weight;
  CHECK(weights == doctest::Approx(1.0).epsilon(1e-15));
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; a + b <= 5; ++b) {
      double sum = 0.0;
      for (const auto& q : rule) sum += q.weight * std::pow(q.barycentric[1], a) * std::pow(q.barycentric[2], b);
      const double exact = std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
      CHECK(0.5 * sum == doctest::Approx(exact).epsilon(1e-14));
    }
}

TEST_CASE("reference-triangle element matrices match the symbolic oracle") {
  const auto space = reference_triangle();
  const LocalMatrix M = element_mass(*space, 0);
  const LocalMatrix K = element_stiffness(*space, 0);
  const LocalDivergence B = element_divergence(*space, 0);
  const Eigen::VectorXd w = interpolate(*space, convecting_field, 0.0);
  const LocalMatrix N = element_convection(*space, 0, w);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      CHECK(M(a, b) == doctest::Approx(kMass[a][b]).epsilon(1e-14).scale(1.0));
      CHECK(K(a, b) == doctest::Approx(kStiffness[a][b]).epsilon(1e-14).scale(1.0));
      CHECK(N(a, b) == doctest::Approx(kConvection[a][b]).epsilon(1e-14).scale(1.0));
    }
  for (int i = 0; i < 3; ++i)
    for (int b = 0; b < 12; ++b) CHECK(B(i, b) == doctest::Approx(kDivergence[i][b]).epsilon(1e-14).scale(1.0));
}

TEST_CASE("trilinear form on one element matches the symbolic oracle") {
  const auto space = reference_triangle();
  const Eigen::VectorXd w = interpolate(*space, convecting_field, 0.0);
  const int n = space->n_vel();
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      const Eigen::VectorXd z = Eigen::VectorXd::Unit(n, space->p2_node(0, a));
      const Eigen::VectorXd v = Eigen::VectorXd::Unit(n, space->p2_node(0, b));
      CHECK(trilinear_b_star(*space, w, v, z) == doctest::Approx(kConvection[a][b]).epsilon(1e-13).scale(1.0));
    }
}

TEST_CASE("global operators agree with the dense oracle") {
  const auto space = jittered_square(3, 11);
  const oracle::DenseOperators dense = oracle::dense_operators(*space);
  const Eigen::MatrixXd M = assemble_mass(*space), K = assemble_stiffness(*space), B = assemble_divergence(*space);
  CHECK(max_abs(M - dense.mass) <= 1e-13 * max_abs(dense.mass));
  CHECK(max_abs(K - dense.stiffness) <= 1e-12 * max_abs(dense.stiffness));
  CHECK(max_abs(B - dense.divergence) <= 1e-13 * max_abs(dense.divergence));
  CHECK(max_abs(pressure_mass_vector(*space) - dense.pressure_mass) <= 1e-15);
  const Eigen::VectorXd w = testing::random_vector(space->n_vel(), 3);
  const Eigen::MatrixXd N = assemble_convection(*space, w);
  const Eigen::MatrixXd Nd = oracle::dense_convection(*space, w);
  CHECK(max_abs(N - Nd) <= 1e-13 * max_abs(Nd));
}

TEST_CASE("mass matrix") {
  const auto space = testing::square_space(6);
  const SparseMatrix M = assemble_mass(*space);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(space->n_vel());
  CHECK(zero.dot(M * zero) == 0.0);
  const Eigen::VectorXd one = interpolate(*space, [](double, double, double) { return Vec2(1.0, 0.0); }, 0.0);
  CHECK(one.dot(M * one) == doctest::Approx(1.0).epsilon(1e-10));
  const Eigen::MatrixXd D = M;
  CHECK(max_abs(D - D.transpose()) <= 1e-12 * max_abs(D));
}

TEST_CASE("stiffness matrix") {
  const auto space = testing::square_space(6);
  const SparseMatrix K = assemble_stiffness(*space);
  const Eigen::VectorXd c = interpolate(*space, [](double, double, double) { return Vec2(2.0, -3.0); }, 0.0);
  CHECK((K * c).norm() <= 1e-12);
  const Eigen::VectorXd u = interpolate(*space, [](double x, double, double) { return Vec2(x, 0.0); }, 0.0);
  CHECK(u.dot(K * u) == doctest::Approx(1.0).epsilon(1e-10));
  const Eigen::MatrixXd D = K;
  CHECK(max_abs(D - D.transpose()) <= 1e-12 * max_abs(D));
}

TEST_CASE("divergence matrix") {
  const auto space = testing::square_space(6);
  const SparseMatrix B = assemble_divergence(*space);
  const Eigen::VectorXd rotation =
      interpolate(*space, [](double x, double y, double) { return Vec2(-(y - 0.3), x - 0.6); }, 0.0);
  CHECK((B * rotation).cwiseAbs().maxCoeff() <= 1e-10);
  const Eigen::VectorXd u = interpolate(*space, [](double x, double, double) { return Vec2(x, 0.0); }, 0.0);
  CHECK((B * u).sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("convection is skew-symmetric") {
  const auto space = jittered_square(5, 2024);
  const int n = space->n_vel();
  CHECK(assemble_convection(*space, Eigen::VectorXd::Zero(n)).norm() == 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd w = testing::random_vector(n, 1000 + trial);
    const Eigen::VectorXd v = testing::random_vector(n, 5000 + trial);
    const SparseMatrix N = assemble_convection(*space, w);
    CHECK(std::abs(v.dot(N * v)) <= 1e-12 * N.norm() * v.squaredNorm());
  }
  const Eigen::VectorXd w = testing::random_vector(n, 7);
  const Eigen::MatrixXd N = assemble_convection(*space, w);
  CHECK(max_abs(N + N.transpose()) <= 1e-15 * max_abs(N));
}

TEST_CASE("trilinear form identities") {
  const auto space = jittered_square(4, 9);
  const int n = space->n_vel();
  const Eigen::VectorXd u = testing::random_vector(n, 1), v = testing::random_vector(n, 2),
                        w = testing::random_vector(n, 3);
  const double scale = std::abs(trilinear_b_star(*space, u, v, w)) + 1.0;
  CHECK(std::abs(trilinear_b_star(*space, u, v, v)) <= 1e-12 * scale);
  CHECK(trilinear_b_star(*space, Eigen::VectorXd::Zero(n), v, w) == 0.0);
  const SparseMatrix N = assemble_convection(*space, u);
  CHECK(trilinear_b_star(*space, u, v, w) == doctest::Approx(w.dot(N * v)).epsilon(1e-12));
  CHECK(apply_convection(*space, u, v).isApprox(N * v, 1e-13));
}

TEST_CASE("interpolation reproduces quadratic fields") {
  const auto space = jittered_square(4, 5);
  auto f = [](double x, double y, double) {
    return Vec2(1.0 + 2.0 * x - y + x * x - 3.0 * x * y + 0.5 * y * y, -0.5 + x * y - 2.0 * y * y + x);
  };
  const Eigen::VectorXd u = interpolate(*space, f, 0.0);
  const Eigen::VectorXd lambda = testing::random_vector(300, 77).cwiseAbs();
  for (int k = 0; k < 100; ++k) {
    const double s = lambda[3 * k] + lambda[3 * k + 1] + lambda[3 * k + 2];
    const std::array<double, 3> bary{lambda[3 * k] / s, lambda[3 * k + 1] / s, lambda[3 * k + 2] / s};
    const std::size_t e = std::size_t(k) % space->num_elements();
    const Point p = space->map_point(e, bary);
    CHECK((space->velocity_value(u, e, bary) - f(p.x, p.y, 0.0)).norm() <= 1e-12);
  }
  CHECK(interpolate(*space, zero_vector_field(), 0.0).norm() == 0.0);
}

TEST_CASE("vortex interpolant energy against quadrature of the analytic field") {
  const auto space = testing::square_space(20);
  const auto u0 = analytic::green_taylor_velocity_field({});
  const Eigen::VectorXd u = interpolate(*space, u0, 0.0);
  const double discrete = 0.5 * u.dot(assemble_mass(*space) * u);
  double analytic_energy = 0.0;
  for (std::size_t e = 0; e < space->num_elements(); ++e)
    for (const auto& q : triangle_rule_degree5()) {
      const Point p = space->map_point(e, q.barycentric);
      analytic_energy += 0.5 * space->area(e) * q.weight * u0(p.x, p.y, 0.0).squaredNorm();
    }
  CHECK(analytic_energy == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(std::abs(discrete - analytic_energy) <= 1e-4);
}

TEST_CASE("homogeneous Dirichlet data gives identity rows and zero values") {
  const auto space = testing::square_space(4);
  const SparseMatrix coupled = couple_saddle_point(assemble_stiffness(*space), assemble_divergence(*space));
  const Eigen::VectorXd rhs = testing::random_vector(space->n_total(), 4);
  const ConstrainedSystem sys = apply_dirichlet(coupled, {rhs}, *space, no_slip(), 0.0);
  const Eigen::MatrixXd A = sys.op.matrix();
  CHECK(sys.op.num_velocity_constraints() == 2 * space->dirichlet_nodes().size());
  for (int dof : sys.op.constrained_dofs()) {
    CHECK(sys.rhs[0][dof] == 0.0);
    CHECK(A(dof, dof) == 1.0);
    CHECK(A.row(dof).cwiseAbs().sum() == 1.0);
    CHECK(A.col(dof).cwiseAbs().sum() == 1.0);
  }
  CHECK(sys.op.matrix().nonZeros() == coupled.nonZeros());
}

TEST_CASE("vortex boundary values equal the analytic field at the nodes") {
  const auto space = testing::square_space(10);
  const SparseMatrix coupled = couple_saddle_point(assemble_stiffness(*space), assemble_divergence(*space));
  const ConstrainedOperator op(coupled, *space, true);
  const analytic::GreenTaylorParams params;
  const Eigen::VectorXd values =
      dirichlet_values(*space, op, boundary_from_field(analytic::green_taylor_velocity_field(params)), 0.1);
  const int n2 = space->num_p2_nodes();
  for (std::size_t i = 0; i < op.num_velocity_constraints(); ++i) {
    const int dof = op.constrained_dofs()[i];
    const Point& p = space->p2_coordinates(dof % n2);
    CHECK(values[Eigen::Index(i)] == analytic::green_taylor(p.x, p.y, 0.1, params).velocity[dof / n2]);
  }
}

TEST_CASE("constant boundary data reproduce the constant Stokes flow") {
  const auto space = testing::square_space(5);
  const VectorField c = [](double, double, double) { return Vec2(1.0, 0.5); };
  const Eigen::VectorXd u = analytic::stokes_initial_condition(*space, 0.7, zero_vector_field(), boundary_from_field(c));
  CHECK((u - interpolate(*space, c, 0.0)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("P2 nodes on shared edges are shared") {
  const auto space = testing::square_space(3);
  const Mesh& mesh = space->mesh();
  CHECK(space->num_p2_nodes() == int(mesh.num_nodes() + mesh.edges().size()));
  CHECK(space->n_pr() == int(mesh.num_nodes()));
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k) CHECK(space->p2_node(t, 3 + k) == int(mesh.num_nodes()) + mesh.triangle_edge(t, k));
  int boundary_nodes = 0;
  for (int i = 0; i < space->num_p2_nodes(); ++i) {
    const Point& p = space->p2_coordinates(i);
    const bool on_side = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
    CHECK(space->is_dirichlet(i) == on_side);
    boundary_nodes += on_side;
  }
  CHECK(boundary_nodes == 24);
}
