#include "dense_oracle.hpp"

#include <array>
#include <cmath>

namespace oracle {

namespace {

using ensflow::Point;
using ensflow::TaylorHoodSpace;

struct QPoint {
  double s, t, w;  // reference coordinates and weight on the unit right triangle (weights sum to 1/2)
};

// Collapsed 5x5 Gauss-Legendre rule, exact well beyond degree 5.
std::vector<QPoint> collapsed_gauss() {
  const double r = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double R = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double wr = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
  const double wR = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
  const std::array<double, 5> x{-R, -r, 0.0, r, R};
  const std::array<double, 5> w{wR, wr, 128.0 / 225.0, wr, wR};
  std::vector<QPoint> rule;
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 5; ++k) {
      const double xi = 0.5 * (x[i] + 1.0), eta = 0.5 * (x[k] + 1.0);
      rule.push_back({xi, eta * (1.0 - xi), 0.25 * w[i] * w[k] * (1.0 - xi)});
    }
  return rule;
}

// Seven-point degree-5 rule (Radon), transcribed from its closed form.
std::vector<QPoint> seven_point() {
  const double s15 = std::sqrt(15.0);
  const double a = (6.0 - s15) / 21.0, b = (6.0 + s15) / 21.0;
  const double wa = (155.0 - s15) / 2400.0, wb = (155.0 + s15) / 2400.0;
  return {{1.0 / 3.0, 1.0 / 3.0, 9.0 / 80.0},
          {a, a, wa}, {1.0 - 2.0 * a, a, wa}, {a, 1.0 - 2.0 * a, wa},
          {b, b, wb}, {1.0 - 2.0 * b, b, wb}, {b, 1.0 - 2.0 * b, wb}};
}

// Basis functions on one element, as monomial coefficients.
struct Element {
  std::array<Point, 3> v;
  double jac;                        // |det| of the affine map
  Eigen::Matrix<double, 6, 6> p2;    // column k: coefficients of phi_k in 1, x, y, x^2, xy, y^2
  Eigen::Matrix3d p1;                // column k: coefficients of psi_k in 1, x, y
  std::array<int, 6> node;
  std::array<int, 3> pnode;

  Point map(double s, double t) const {
    return {v[0].x + s * (v[1].x - v[0].x) + t * (v[2].x - v[0].x),
            v[0].y + s * (v[1].y - v[0].y) + t * (v[2].y - v[0].y)};
  }
  Eigen::Matrix<double, 6, 1> phi(const Point& p) const {
    Eigen::Matrix<double, 6, 1> m;
    m << 1.0, p.x, p.y, p.x * p.x, p.x * p.y, p.y * p.y;
    return p2.transpose() * m;
  }
  Eigen::Matrix<double, 6, 1> phi_x(const Point& p) const {
    Eigen::Matrix<double, 6, 1> m;
    m << 0.0, 1.0, 0.0, 2.0 * p.x, p.y, 0.0;
    return p2.transpose() * m;
  }
  Eigen::Matrix<double, 6, 1> phi_y(const Point& p) const {
    Eigen::Matrix<double, 6, 1> m;
    m << 0.0, 0.0, 1.0, 0.0, p.x, 2.0 * p.y;
    return p2.transpose() * m;
  }
  Eigen::Vector3d psi(const Point& p) const { return p1.transpose() * Eigen::Vector3d(1.0, p.x, p.y); }
};

Point midpoint(const Point& a, const Point& b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

Element element(const TaylorHoodSpace& space, std::size_t e) {
  const auto& mesh = space.mesh();
  Element el;
  for (int k = 0; k < 3; ++k) {
    el.v[k] = mesh.nodes()[mesh.triangles()[e][k]];
    el.pnode[k] = mesh.triangles()[e][k];
  }
  el.jac = std::abs((el.v[1].x - el.v[0].x) * (el.v[2].y - el.v[0].y) -
                    (el.v[2].x - el.v[0].x) * (el.v[1].y - el.v[0].y));
  const std::array<Point, 6> pts{el.v[0], el.v[1], el.v[2], midpoint(el.v[0], el.v[1]),
                                 midpoint(el.v[1], el.v[2]), midpoint(el.v[2], el.v[0])};
  Eigen::Matrix<double, 6, 6> V;
  for (int i = 0; i < 6; ++i) {
    const Point& p = pts[i];
    V.row(i) << 1.0, p.x, p.y, p.x * p.x, p.x * p.y, p.y * p.y;
  }
  // phi_k(p_i) = delta_ik  <=>  V * C = I.
  el.p2 = V.fullPivLu().solve(Eigen::Matrix<double, 6, 6>::Identity());
  Eigen::Matrix3d W;
  for (int i = 0; i < 3; ++i) W.row(i) << 1.0, el.v[i].x, el.v[i].y;
  el.p1 = W.fullPivLu().solve(Eigen::Matrix3d::Identity());
  for (int k = 0; k < 6; ++k) el.node[k] = space.p2_node(e, k);
  return el;
}

ensflow::Vec2 field_value(const Element& el, const Eigen::VectorXd& u, int n2, const Point& p) {
  const auto phi = el.phi(p);
  ensflow::Vec2 v = ensflow::Vec2::Zero();
  for (int k = 0; k < 6; ++k) {
    v[0] += u[el.node[k]] * phi[k];
    v[1] += u[n2 + el.node[k]] * phi[k];
  }
  return v;
}

}  // namespace

DenseOperators dense_operators(const TaylorHoodSpace& space) {
  const int n2 = space.num_p2_nodes(), nv = space.n_vel(), np = space.n_pr();
  DenseOperators ops;
  ops.mass = Eigen::MatrixXd::Zero(nv, nv);
  ops.stiffness = Eigen::MatrixXd::Zero(nv, nv);
  ops.divergence = Eigen::MatrixXd::Zero(np, nv);
  ops.pressure_mass = Eigen::VectorXd::Zero(np);
  ops.nodes.assign(n2, Point{});
  ops.boundary.assign(n2, false);

  const auto& mesh = space.mesh();
  std::vector<std::array<int, 2>> boundary_edges;
  for (const auto& be : mesh.boundary_edges())
    boundary_edges.push_back({std::min(be.nodes[0], be.nodes[1]), std::max(be.nodes[0], be.nodes[1])});
  auto on_boundary = [&](int a, int b) {
    const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    for (const auto& be : boundary_edges)
      if (be == key) return true;
    return false;
  };

  const auto rule = collapsed_gauss();
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const Element el = element(space, e);
    const std::array<Point, 6> pts{el.v[0], el.v[1], el.v[2], midpoint(el.v[0], el.v[1]),
                                   midpoint(el.v[1], el.v[2]), midpoint(el.v[2], el.v[0])};
    for (int k = 0; k < 6; ++k) ops.nodes[el.node[k]] = pts[k];
    const std::array<std::array<int, 3>, 3> sides{{{0, 1, 3}, {1, 2, 4}, {2, 0, 5}}};
    for (const auto& [a, b, mid] : sides)
      if (on_boundary(el.pnode[a], el.pnode[b]))
        ops.boundary[el.node[a]] = ops.boundary[el.node[b]] = ops.boundary[el.node[mid]] = true;

    for (const auto& q : rule) {
      const Point p = el.map(q.s, q.t);
      const double w = q.w * el.jac;
      const auto phi = el.phi(p), dx = el.phi_x(p), dy = el.phi_y(p);
      const auto psi = el.psi(p);
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
          const double m = w * phi[a] * phi[b];
          const double k = w * (dx[a] * dx[b] + dy[a] * dy[b]);
          for (int c = 0; c < 2; ++c) {
            ops.mass(c * n2 + el.node[a], c * n2 + el.node[b]) += m;
            ops.stiffness(c * n2 + el.node[a], c * n2 + el.node[b]) += k;
          }
        }
      }
      for (int i = 0; i < 3; ++i) {
        ops.pressure_mass[el.pnode[i]] += w * psi[i];
        for (int b = 0; b < 6; ++b) {
          ops.divergence(el.pnode[i], el.node[b]) += w * psi[i] * dx[b];
          ops.divergence(el.pnode[i], n2 + el.node[b]) += w * psi[i] * dy[b];
        }
      }
    }
  }
  return ops;
}

Eigen::MatrixXd dense_convection(const TaylorHoodSpace& space, const Eigen::VectorXd& w) {
  const int n2 = space.num_p2_nodes(), nv = space.n_vel();
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(nv, nv);
  const auto rule = collapsed_gauss();
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const Element el = element(space, e);
    for (const auto& q : rule) {
      const Point p = el.map(q.s, q.t);
      const double weight = q.w * el.jac;
      const auto phi = el.phi(p), dx = el.phi_x(p), dy = el.phi_y(p);
      const ensflow::Vec2 wv = field_value(el, w, n2, p);
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
          const double adv_b = wv[0] * dx[b] + wv[1] * dy[b];
          const double adv_a = wv[0] * dx[a] + wv[1] * dy[a];
          const double v = weight * 0.5 * (adv_b * phi[a] - adv_a * phi[b]);
          for (int c = 0; c < 2; ++c) N(c * n2 + el.node[a], c * n2 + el.node[b]) += v;
        }
    }
  }
  return N;
}

Eigen::VectorXd dense_load(const TaylorHoodSpace& space, const ensflow::VectorField& f, double t) {
  const int n2 = space.num_p2_nodes();
  Eigen::VectorXd F = Eigen::VectorXd::Zero(space.n_vel());
  const auto rule = seven_point();
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const Element el = element(space, e);
    for (const auto& q : rule) {
      const Point p = el.map(q.s, q.t);
      const double w = q.w * el.jac;
      const auto phi = el.phi(p);
      const ensflow::Vec2 fv = f(p.x, p.y, t);
      for (int a = 0; a < 6; ++a) {
        F[el.node[a]] += w * fv[0] * phi[a];
        F[n2 + el.node[a]] += w * fv[1] * phi[a];
      }
    }
  }
  return F;
}

Eigen::VectorXd nodal_interpolant(const DenseOperators& ops, const ensflow::VectorField& f, double t) {
  const int n2 = static_cast<int>(ops.nodes.size());
  Eigen::VectorXd u(2 * n2);
  for (int i = 0; i < n2; ++i) {
    const ensflow::Vec2 v = f(ops.nodes[i].x, ops.nodes[i].y, t);
    u[i] = v[0];
    u[n2 + i] = v[1];
  }
  return u;
}

Eigen::VectorXd ensemble_rhs(const TaylorHoodSpace& space, const DenseOperators& ops,
                             const std::vector<Eigen::VectorXd>& u, const std::vector<double>& nu,
                             const ensflow::VectorField& f, int j, double t_next, double dt) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(u.front().size());
  double nu_bar = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    mean += u[i];
    nu_bar += nu[i];
  }
  mean /= double(u.size());
  nu_bar /= double(u.size());
  return dense_load(space, f, t_next) + ops.mass * u[j] / dt - dense_convection(space, u[j] - mean) * u[j] -
         (nu[j] - nu_bar) * (ops.stiffness * u[j]);
}

namespace {

// Replaces boundary velocity rows by identity rows and pins pressure at
// vertex 0; returns (velocity, zero-mean pressure).
std::pair<Eigen::VectorXd, Eigen::VectorXd> solve_constrained(const TaylorHoodSpace& space, const DenseOperators& ops,
                                                              const Eigen::MatrixXd& A, Eigen::VectorXd f,
                                                              const ensflow::VectorField& g, double t_next) {
  const int n2 = space.num_p2_nodes(), nv = space.n_vel(), np = space.n_pr();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(nv + np, nv + np);
  S.topLeftCorner(nv, nv) = A;
  S.topRightCorner(nv, np) = -ops.divergence.transpose();
  S.bottomLeftCorner(np, nv) = -ops.divergence;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nv + np);
  b.head(nv) = f;
  for (int i = 0; i < n2; ++i) {
    if (!ops.boundary[i]) continue;
    const ensflow::Vec2 v = g(ops.nodes[i].x, ops.nodes[i].y, t_next);
    for (int c = 0; c < 2; ++c) {
      S.row(c * n2 + i).setZero();
      S(c * n2 + i, c * n2 + i) = 1.0;
      b[c * n2 + i] = v[c];
    }
  }
  S.row(nv).setZero();
  S(nv, nv) = 1.0;
  b[nv] = 0.0;
  const Eigen::VectorXd x = S.partialPivLu().solve(b);
  Eigen::VectorXd p = x.tail(np);
  p.array() -= ops.pressure_mass.dot(p) / ops.pressure_mass.sum();
  return {x.head(nv), p};
}

}  // namespace

DenseState ensemble_step(const TaylorHoodSpace& space, const DenseOperators& ops, const std::vector<Eigen::VectorXd>& u,
                         const std::vector<double>& nu, const std::vector<ensflow::VectorField>& f,
                         const ensflow::VectorField& g, double t_next, double dt) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(u.front().size());
  double nu_bar = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    mean += u[i];
    nu_bar += nu[i];
  }
  mean /= double(u.size());
  nu_bar /= double(u.size());
  const Eigen::MatrixXd A = ops.mass / dt + dense_convection(space, mean) + nu_bar * ops.stiffness;

  DenseState out;
  for (std::size_t j = 0; j < u.size(); ++j) {
    auto [vel, pr] = solve_constrained(space, ops, A, ensemble_rhs(space, ops, u, nu, f[j], int(j), t_next, dt), g,
                                       t_next);
    out.velocity.push_back(std::move(vel));
    out.pressure.push_back(std::move(pr));
  }
  return out;
}

DenseState linearly_implicit_step(const TaylorHoodSpace& space, const DenseOperators& ops, const Eigen::VectorXd& u,
                                  double nu, const ensflow::VectorField& f, const ensflow::VectorField& g,
                                  double t_next, double dt) {
  const Eigen::MatrixXd A = ops.mass / dt + dense_convection(space, u) + nu * ops.stiffness;
  const Eigen::VectorXd rhs = dense_load(space, f, t_next) + ops.mass * u / dt;
  auto [vel, pr] = solve_constrained(space, ops, A, rhs, g, t_next);
  return {{std::move(vel)}, {std::move(pr)}};
}

}  // namespace oracle
