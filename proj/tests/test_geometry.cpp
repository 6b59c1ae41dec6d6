#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "morphoflow/errors.hpp"
#include "morphoflow/geometry.hpp"

using namespace morphoflow;

namespace {

// Ramanujan's second approximation, accurate to ~1e-10 relative for b/a = 0.6
double ellipse_perimeter(double a, double b) {
  const double h = (a - b) * (a - b) / ((a + b) * (a + b));
  return std::numbers::pi * (a + b) * (1.0 + 3.0 * h / (10.0 + std::sqrt(4.0 - 3.0 * h)));
}

}  // namespace

TEST_CASE("ellipse mesh satisfies the structural invariants") {
  const Mesh m = make_ellipse_mesh(1.0, 0.6, 0.08);
  CHECK_NOTHROW(validate_mesh(m));
  for (const auto& t : m.triangles)
    CHECK(signed_area(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]) > 0.0);
  for (const auto& p : m.nodes)
    CHECK(p.x() * p.x() + p.y() * p.y() / 0.36 <= 1.0 + 1e-12);

  const auto loops = boundary_loops(m);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].size() == m.boundary_edges.size());
  // every boundary node lies on the ellipse
  for (auto i : loops[0]) {
    const Vec2& p = m.nodes[i];
    CHECK(p.x() * p.x() + p.y() * p.y() / 0.36 == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(max_edge_length(m) <= 2.0 * 0.08);
}

TEST_CASE("boundary is counterclockwise with the domain on its left") {
  const Mesh m = make_ellipse_mesh(1.0, 0.6, 0.1);
  const Points poly = boundary_polyline(m, m.nodes);
  double shoelace = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    shoelace += a.x() * b.y() - b.x() * a.y();
  }
  CHECK(0.5 * shoelace > 0.0);
  CHECK(0.5 * shoelace == doctest::Approx(mesh_area(m)).epsilon(1e-12));
}

TEST_CASE("disk area converges to pi") {
  const Mesh m = make_ellipse_mesh(1.0, 1.0, 0.05);
  CHECK(std::abs(mesh_area(m) - std::numbers::pi) <= 0.02 * std::numbers::pi);
  const Mesh fine = make_ellipse_mesh(1.0, 1.0, 0.025);
  CHECK(std::abs(mesh_area(fine) - std::numbers::pi) < std::abs(mesh_area(m) - std::numbers::pi));
}

TEST_CASE("boundary resolution tracks the target edge length") {
  const double h = 0.05;
  const Mesh m = make_ellipse_mesh(1.0, 0.6, h);
  const double expected = ellipse_perimeter(1.0, 0.6) / h;
  const auto nb = static_cast<double>(m.boundary_edges.size());
  CHECK(nb >= 0.5 * expected);
  CHECK(nb <= 2.0 * expected);
}

TEST_CASE("mesh generator rejects bad parameters") {
  CHECK_THROWS_AS(make_ellipse_mesh(0.0, 1.0, 0.1), ParameterError);
  CHECK_THROWS_AS(make_ellipse_mesh(1.0, -1.0, 0.1), ParameterError);
  CHECK_THROWS_AS(make_ellipse_mesh(1.0, 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(make_rectangle_mesh(0, 1, 0, 1, 0, 3), ParameterError);
}

TEST_CASE("rectangle mesh") {
  const Mesh m = make_rectangle_mesh(0.0, 2.0, -1.0, 1.0, 4, 3);
  CHECK(m.num_nodes() == 20);
  CHECK(m.num_triangles() == 24);
  CHECK(m.boundary_edges.size() == 14);
  CHECK(mesh_area(m) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_NOTHROW(validate_mesh(m));
}

TEST_CASE("validate_mesh catches broken meshes") {
  Mesh m = make_rectangle_mesh(0, 1, 0, 1, 2, 2);
  SUBCASE("clockwise triangle") {
    std::swap(m.triangles[0][1], m.triangles[0][2]);
    CHECK_THROWS_AS(validate_mesh(m), ParameterError);
  }
  SUBCASE("index out of range") {
    m.triangles[0][0] = 99;
    CHECK_THROWS_AS(validate_mesh(m), ParameterError);
  }
  SUBCASE("duplicate node") {
    m.nodes[1] = m.nodes[0];
    CHECK_THROWS_AS(validate_mesh(m), ParameterError);
  }
}

TEST_CASE("boundary extraction on a single triangle") {
  const std::vector<Triangle> tris{{0, 1, 2}};
  const auto edges = extract_boundary_edges(tris);
  REQUIRE(edges.size() == 3);
  std::set<std::pair<std::size_t, std::size_t>> got;
  for (const auto& e : edges) got.insert({e[0], e[1]});
  CHECK(got == std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}, {2, 0}});
}

TEST_CASE("mesh text round trip is exact") {
  const Mesh m = make_ellipse_mesh(1.0, 0.6, 0.2);
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh r = read_mesh(ss);
  REQUIRE(r.num_nodes() == m.num_nodes());
  for (std::size_t i = 0; i < m.num_nodes(); ++i) CHECK(r.nodes[i] == m.nodes[i]);
  CHECK(r.triangles == m.triangles);
  CHECK(r.boundary_edges == m.boundary_edges);
}

TEST_CASE("read_mesh rejects garbage") {
  std::istringstream in("v 0 0\nv 1 0\nq 1 2 3\n");
  CHECK_THROWS(read_mesh(in));
}

TEST_CASE("identity deformation") {
  const Mesh m = make_ellipse_mesh(1.0, 0.6, 0.2);
  const DeformationState s = DeformationState::identity(m);
  CHECK(s.min_jacobian() == 1.0);
  CHECK_NOTHROW(check_positive_jacobian(s));
}

TEST_CASE("check_positive_jacobian reports the offending node") {
  const Mesh m = make_rectangle_mesh(0, 1, 0, 1, 2, 2);
  DeformationState s = DeformationState::identity(m);
  s.grad[4] = Mat2{{1.0, 0.0}, {0.0, -0.5}};
  s.recompute_jacobians();
  CHECK(s.min_jacobian() == -0.5);
  try {
    check_positive_jacobian(s);
    FAIL("expected a throw");
  } catch (const DegenerateDeformationError& e) {
    CHECK(e.node() == 4);
    CHECK(e.jacobian() == -0.5);
  }
}

TEST_CASE("eulerian density") {
  const Mesh m = make_ellipse_mesh(1.0, 0.6, 0.15);
  const DensityField tau = DensityField::constant(m.num_nodes(), 0.8);
  DeformationState s = DeformationState::identity(m);

  SUBCASE("identity leaves tau unchanged") {
    CHECK(eulerian_density(s, tau).isApprox(tau.values, 0.0));
  }
  SUBCASE("uniform dilation by 2 quarters the density") {
    for (std::size_t i = 0; i < s.size(); ++i) {
      s.positions[i] *= 2.0;
      s.grad[i] = 2.0 * Mat2::Identity();
    }
    s.recompute_jacobians();
    const Eigen::VectorXd p = eulerian_density(s, tau);
    for (Eigen::Index i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(0.2).epsilon(1e-15));
    // ∫_{φ(M)} p = ∫_M τ for a linear map
    CHECK(integrate_nodal(m, s.positions, p) ==
          doctest::Approx(integrate_nodal(m, m.nodes, tau.values)).epsilon(1e-12));
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(eulerian_density(s, DensityField::constant(3, 1.0)), ParameterError);
  }
}

TEST_CASE("gradient recovery reproduces affine fields") {
  const Mesh m = make_ellipse_mesh(1.0, 0.6, 0.1);
  Eigen::VectorXd f(static_cast<Eigen::Index>(m.num_nodes()));
  for (std::size_t i = 0; i < m.num_nodes(); ++i)
    f[static_cast<Eigen::Index>(i)] = 3.0 - 2.0 * m.nodes[i].x() + 0.5 * m.nodes[i].y();
  for (const Vec2& g : recover_gradient(f, m)) {
    CHECK(g.x() == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(g.y() == doctest::Approx(0.5).epsilon(1e-10));
  }
  f.setConstant(7.0);
  for (const Vec2& g : recover_gradient(f, m)) CHECK(g.norm() < 1e-12);
}

TEST_CASE("gradient recovery of x^2 converges at interior nodes") {
  auto interior_error = [](double h) {
    const Mesh m = make_rectangle_mesh(-1, 1, -1, 1, static_cast<std::size_t>(2.0 / h),
                                       static_cast<std::size_t>(2.0 / h));
    Eigen::VectorXd f(static_cast<Eigen::Index>(m.num_nodes()));
    for (std::size_t i = 0; i < m.num_nodes(); ++i)
      f[static_cast<Eigen::Index>(i)] = m.nodes[i].x() * m.nodes[i].x();
    const auto g = recover_gradient(f, m);
    double err = 0.0;
    for (std::size_t i = 0; i < m.num_nodes(); ++i) {
      const Vec2& p = m.nodes[i];
      if (std::abs(p.x()) > 0.75 || std::abs(p.y()) > 0.75) continue;
      err = std::max(err, (g[i] - Vec2(2.0 * p.x(), 0.0)).norm());
    }
    return err;
  };
  const double e1 = interior_error(0.1);
  const double e2 = interior_error(0.05);
  CHECK(e1 < 0.05);
  CHECK(e2 < 0.6 * e1 + 1e-12);
}

TEST_CASE("quadrature integrates quadratics exactly") {
  const Mesh m = make_rectangle_mesh(0, 1, 0, 1, 3, 3);
  const auto qps = triangle_quadrature(m, m.nodes);
  CHECK(qps.size() == 3 * m.num_triangles());
  double one = 0.0, xy = 0.0, x2 = 0.0;
  for (const auto& q : qps) {
    one += q.weight;
    xy += q.weight * q.position.x() * q.position.y();
    x2 += q.weight * q.position.x() * q.position.x();
    CHECK(q.bary[0] + q.bary[1] + q.bary[2] == doctest::Approx(1.0));
  }
  CHECK(one == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(xy == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(x2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("integrate_nodal of a linear field") {
  const Mesh m = make_rectangle_mesh(0, 2, 0, 1, 4, 2);
  Eigen::VectorXd f(static_cast<Eigen::Index>(m.num_nodes()));
  for (std::size_t i = 0; i < m.num_nodes(); ++i) f[static_cast<Eigen::Index>(i)] = m.nodes[i].x();
  CHECK(integrate_nodal(m, m.nodes, f) == doctest::Approx(2.0).epsilon(1e-14));
}
