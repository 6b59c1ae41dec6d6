#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "morphoflow/types.hpp"

namespace morphoflow {

using Triangle = std::array<std::size_t, 3>;
using Edge = std::array<std::size_t, 2>;

/// Triangulated reference domain. Triangles are counterclockwise; boundary
/// edges are oriented so that the domain lies to their left (outward normal
/// on the right).
struct Mesh {
  Points nodes;
  std::vector<Triangle> triangles;
  std::vector<Edge> boundary_edges;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
};

/// Throws ParameterError describing the first violated mesh invariant.
void validate_mesh(const Mesh& mesh);

/// Structured polar triangulation of the ellipse x²/a² + y²/b² ≤ 1.
Mesh make_ellipse_mesh(double semi_a, double semi_b, double target_edge_length);

/// Axis-aligned rectangle split into nx × ny cells, two triangles per cell.
Mesh make_rectangle_mesh(double x0, double x1, double y0, double y1, std::size_t nx,
                         std::size_t ny);

/// Boundary edges (edges used by exactly one triangle), oriented like their triangle.
std::vector<Edge> extract_boundary_edges(const std::vector<Triangle>& triangles);

/// Boundary edges chained into closed loops of node indices, longest loop first.
std::vector<std::vector<std::size_t>> boundary_loops(const Mesh& mesh);

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c);

/// Sum of triangle areas with nodes taken from `positions` (deformed or reference).
double mesh_area(const Mesh& mesh, const Points& positions);
double mesh_area(const Mesh& mesh);

double max_edge_length(const Mesh& mesh);

void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

/// Per-node flow state: φ(t, x_i), Dφ(t, x_i) and Jφ = det Dφ.
struct DeformationState {
  Points positions;
  std::vector<Mat2> grad;
  std::vector<double> jac;
  double time = 0.0;

  static DeformationState identity(const Mesh& mesh);

  std::size_t size() const { return positions.size(); }
  void recompute_jacobians();
  double min_jacobian() const;
};

/// Throws DegenerateDeformationError if any nodal Jacobian is ≤ 0 or not finite.
void check_positive_jacobian(const DeformationState& state);

/// Lagrangian density τ on the reference mesh.
struct DensityField {
  Eigen::VectorXd values;

  DensityField() = default;
  explicit DensityField(Eigen::VectorXd v) : values(std::move(v)) {}
  static DensityField constant(std::size_t n, double c) {
    return DensityField(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), c));
  }
  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

/// Nodal Eulerian density p(φ(x_i)) = τ(x_i) / Jφ(x_i).
Eigen::VectorXd eulerian_density(const DeformationState& state, const DensityField& tau);

/// Lumped L2 projection of piecewise-constant element gradients onto the nodes.
/// Reproduces globally affine fields exactly.
std::vector<Vec2> recover_gradient(const Eigen::VectorXd& values, const Mesh& mesh);
inline std::vector<Vec2> recover_gradient(const DensityField& tau, const Mesh& mesh) {
  return recover_gradient(tau.values, mesh);
}

/// 3-point (degree 2) rule, interior points at barycentric (2/3, 1/6, 1/6).
struct QuadraturePoint {
  Vec2 position;
  double weight;
  std::size_t triangle;
  std::array<double, 3> bary;
};

std::vector<QuadraturePoint> triangle_quadrature(const Mesh& mesh, const Points& positions);

/// ∫ f over the mesh (nodes at `positions`) for a piecewise-linear nodal field f.
double integrate_nodal(const Mesh& mesh, const Points& positions, const Eigen::VectorXd& f);

/// Ordered boundary polyline of the longest loop, positions taken from `positions`.
Points boundary_polyline(const Mesh& mesh, const Points& positions);

}  // namespace morphoflow
