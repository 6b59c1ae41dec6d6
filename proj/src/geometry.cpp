#include "morphoflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "morphoflow/errors.hpp"

namespace morphoflow {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

std::vector<Edge> extract_boundary_edges(const std::vector<Triangle>& triangles) {
  // key: sorted pair, value: (count, oriented edge of first occurrence)
  std::map<std::pair<std::size_t, std::size_t>, std::pair<int, Edge>> edges;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      const std::size_t a = t[k];
      const std::size_t b = t[(k + 1) % 3];
      auto key = std::minmax(a, b);
      auto [it, inserted] = edges.try_emplace({key.first, key.second}, 0, Edge{a, b});
      ++it->second.first;
    }
  }
  std::vector<Edge> out;
  for (const auto& [key, val] : edges) {
    if (val.first == 1) out.push_back(val.second);
  }
  return out;
}

namespace {

std::vector<std::vector<std::size_t>> chain_loops(const std::vector<Edge>& edges,
                                                  std::size_t num_nodes) {
  std::vector<std::ptrdiff_t> next(num_nodes, -1);
  for (const auto& e : edges) {
    if (e[0] >= num_nodes || e[1] >= num_nodes)
      throw ParameterError("boundary edge references a missing node");
    if (next[e[0]] != -1)
      throw ParameterError("boundary node " + std::to_string(e[0]) +
                           " starts more than one boundary edge");
    next[e[0]] = static_cast<std::ptrdiff_t>(e[1]);
  }
  std::vector<char> used(num_nodes, 0);
  std::vector<std::vector<std::size_t>> loops;
  for (const auto& e : edges) {
    if (used[e[0]]) continue;
    std::vector<std::size_t> loop;
    std::size_t cur = e[0];
    while (!used[cur]) {
      used[cur] = 1;
      loop.push_back(cur);
      if (next[cur] < 0) throw ParameterError("boundary edges do not form closed loops");
      cur = static_cast<std::size_t>(next[cur]);
    }
    if (cur != loop.front()) throw ParameterError("boundary edges do not form closed loops");
    loops.push_back(std::move(loop));
  }
  std::stable_sort(loops.begin(), loops.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return loops;
}

}  // namespace

std::vector<std::vector<std::size_t>> boundary_loops(const Mesh& mesh) {
  return chain_loops(mesh.boundary_edges, mesh.num_nodes());
}

void validate_mesh(const Mesh& mesh) {
  if (mesh.nodes.empty() || mesh.triangles.empty()) throw ParameterError("empty mesh");
  const std::size_t n = mesh.num_nodes();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (auto v : tri)
      if (v >= n) throw ParameterError("triangle " + std::to_string(t) + " references a missing node");
    if (!(signed_area(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]) > 0.0))
      throw ParameterError("triangle " + std::to_string(t) + " has non-positive signed area");
  }
  auto expected = extract_boundary_edges(mesh.triangles);
  auto given = mesh.boundary_edges;
  std::sort(expected.begin(), expected.end());
  std::sort(given.begin(), given.end());
  if (expected != given)
    throw ParameterError("boundary edges do not match the triangles' single-use edges");
  chain_loops(mesh.boundary_edges, n);
}

Mesh make_ellipse_mesh(double semi_a, double semi_b, double target_edge_length) {
  if (!(semi_a > 0.0) || !(semi_b > 0.0))
    throw ParameterError("ellipse semi-axes must be positive");
  if (!(target_edge_length > 0.0) || !(target_edge_length < std::min(semi_a, semi_b)))
    throw ParameterError("target edge length must be positive and below the smaller semi-axis");

  const double amax = std::max(semi_a, semi_b);
  const auto rings = static_cast<std::size_t>(std::ceil(amax / target_edge_length));
  Mesh mesh;
  mesh.nodes.emplace_back(0.0, 0.0);

  // ring k holds count[k] nodes at uniform angles starting at θ = 0
  std::vector<std::size_t> start{0}, count{1};
  for (std::size_t k = 1; k <= rings; ++k) {
    const double rho = static_cast<double>(k) / static_cast<double>(rings);
    const auto n = std::max<std::size_t>(
        6, static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi * amax * rho / target_edge_length)));
    start.push_back(mesh.nodes.size());
    count.push_back(n);
    for (std::size_t s = 0; s < n; ++s) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(n);
      mesh.nodes.emplace_back(semi_a * rho * std::cos(th), semi_b * rho * std::sin(th));
    }
  }

  auto add = [&mesh](std::size_t a, std::size_t b, std::size_t c) {
    if (signed_area(mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]) < 0.0) std::swap(b, c);
    mesh.triangles.push_back({a, b, c});
  };

  for (std::size_t s = 0; s < count[1]; ++s)
    add(0, start[1] + s, start[1] + (s + 1) % count[1]);

  // zip consecutive rings by angle: advance whichever ring's next node comes first
  for (std::size_t k = 2; k <= rings; ++k) {
    const std::size_t ni = count[k - 1], no = count[k];
    std::size_t i = 0, o = 0;
    while (i < ni || o < no) {
      const double ti = static_cast<double>(i + 1) / static_cast<double>(ni);
      const double to = static_cast<double>(o + 1) / static_cast<double>(no);
      const std::size_t in_cur = start[k - 1] + i % ni;
      const std::size_t out_cur = start[k] + o % no;
      if (o < no && (i >= ni || to <= ti)) {
        add(in_cur, out_cur, start[k] + (o + 1) % no);
        ++o;
      } else {
        add(in_cur, out_cur, start[k - 1] + (i + 1) % ni);
        ++i;
      }
    }
  }

  const std::size_t outer = start[rings], n_outer = count[rings];
  for (std::size_t s = 0; s < n_outer; ++s)
    mesh.boundary_edges.push_back({outer + s, outer + (s + 1) % n_outer});

  validate_mesh(mesh);
  return mesh;
}

Mesh make_rectangle_mesh(double x0, double x1, double y0, double y1, std::size_t nx,
                         std::size_t ny) {
  if (!(x1 > x0) || !(y1 > y0) || nx == 0 || ny == 0)
    throw ParameterError("degenerate rectangle mesh request");
  Mesh mesh;
  for (std::size_t j = 0; j <= ny; ++j)
    for (std::size_t i = 0; i <= nx; ++i)
      mesh.nodes.emplace_back(x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(nx),
                              y0 + (y1 - y0) * static_cast<double>(j) / static_cast<double>(ny));
  auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  mesh.boundary_edges = extract_boundary_edges(mesh.triangles);
  validate_mesh(mesh);
  return mesh;
}

double mesh_area(const Mesh& mesh, const Points& positions) {
  double area = 0.0;
  for (const auto& t : mesh.triangles)
    area += signed_area(positions[t[0]], positions[t[1]], positions[t[2]]);
  return area;
}

double mesh_area(const Mesh& mesh) { return mesh_area(mesh, mesh.nodes); }

double max_edge_length(const Mesh& mesh) {
  double m = 0.0;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k)
      m = std::max(m, (mesh.nodes[t[k]] - mesh.nodes[t[(k + 1) % 3]]).norm());
  return m;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out.precision(17);
  for (const auto& p : mesh.nodes) out << "v " << p.x() << ' ' << p.y() << '\n';
  for (const auto& t : mesh.triangles) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges) out << "b " << e[0] << ' ' << e[1] << '\n';
}

Mesh read_mesh(std::istream& in) {
  Mesh mesh;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    bool ok = true;
    if (tag == "v") {
      double x, y;
      ok = static_cast<bool>(ss >> x >> y);
      if (ok) mesh.nodes.emplace_back(x, y);
    } else if (tag == "t") {
      Triangle t;
      ok = static_cast<bool>(ss >> t[0] >> t[1] >> t[2]);
      if (ok) mesh.triangles.push_back(t);
    } else if (tag == "b") {
      Edge e;
      ok = static_cast<bool>(ss >> e[0] >> e[1]);
      if (ok) mesh.boundary_edges.push_back(e);
    } else {
      ok = false;
    }
    if (!ok) throw ParameterError("mesh file line " + std::to_string(lineno) + ": malformed record");
  }
  validate_mesh(mesh);
  return mesh;
}

DeformationState DeformationState::identity(const Mesh& mesh) {
  DeformationState s;
  s.positions = mesh.nodes;
  s.grad.assign(mesh.num_nodes(), Mat2::Identity());
  s.jac.assign(mesh.num_nodes(), 1.0);
  s.time = 0.0;
  return s;
}

void DeformationState::recompute_jacobians() {
  jac.resize(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) jac[i] = grad[i].determinant();
}

double DeformationState::min_jacobian() const {
  return jac.empty() ? 1.0 : *std::min_element(jac.begin(), jac.end());
}

void check_positive_jacobian(const DeformationState& state) {
  for (std::size_t i = 0; i < state.jac.size(); ++i) {
    if (!(state.jac[i] > 0.0) || !std::isfinite(state.jac[i])) {
      std::ostringstream msg;
      msg << "non-positive Jacobian " << state.jac[i] << " at node " << i << " (t = " << state.time
          << ")";
      throw DegenerateDeformationError(msg.str(), i, state.jac[i]);
    }
  }
}

Eigen::VectorXd eulerian_density(const DeformationState& state, const DensityField& tau) {
  if (tau.size() != state.size())
    throw ParameterError("density and deformation state have different node counts");
  check_positive_jacobian(state);
  Eigen::VectorXd p(tau.values.size());
  for (Eigen::Index i = 0; i < p.size(); ++i)
    p[i] = tau.values[i] / state.jac[static_cast<std::size_t>(i)];
  return p;
}

std::vector<Vec2> recover_gradient(const Eigen::VectorXd& values, const Mesh& mesh) {
  if (static_cast<std::size_t>(values.size()) != mesh.num_nodes())
    throw ParameterError("field length does not match mesh node count");
  std::vector<Vec2> acc(mesh.num_nodes(), Vec2::Zero());
  std::vector<double> weight(mesh.num_nodes(), 0.0);
  for (const auto& t : mesh.triangles) {
    const Vec2& a = mesh.nodes[t[0]];
    const Vec2& b = mesh.nodes[t[1]];
    const Vec2& c = mesh.nodes[t[2]];
    const double area = signed_area(a, b, c);
    // ∇u = (u_a (c−b)⊥ + u_b (a−c)⊥ + u_c (b−a)⊥) / (2A), with (x,y)⊥ = (−y,x)
    auto perp = [](const Vec2& e) { return Vec2(-e.y(), e.x()); };
    const Vec2 g = (values[t[0]] * perp(c - b) + values[t[1]] * perp(a - c) +
                    values[t[2]] * perp(b - a)) /
                   (2.0 * area);
    for (auto v : t) {
      acc[v] += area * g;
      weight[v] += area;
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i)
    if (weight[i] > 0.0) acc[i] /= weight[i];
  return acc;
}

std::vector<QuadraturePoint> triangle_quadrature(const Mesh& mesh, const Points& positions) {
  static constexpr std::array<std::array<double, 3>, 3> kBary{
      {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
       {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
       {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}}};
  std::vector<QuadraturePoint> qps;
  qps.reserve(3 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2& a = positions[tri[0]];
    const Vec2& b = positions[tri[1]];
    const Vec2& c = positions[tri[2]];
    const double area = signed_area(a, b, c);
    for (const auto& w : kBary)
      qps.push_back({w[0] * a + w[1] * b + w[2] * c, area / 3.0, t, w});
  }
  return qps;
}

double integrate_nodal(const Mesh& mesh, const Points& positions, const Eigen::VectorXd& f) {
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    const double area = signed_area(positions[t[0]], positions[t[1]], positions[t[2]]);
    total += area * (f[t[0]] + f[t[1]] + f[t[2]]) / 3.0;
  }
  return total;
}

Points boundary_polyline(const Mesh& mesh, const Points& positions) {
  auto loops = boundary_loops(mesh);
  if (loops.empty()) throw ParameterError("mesh has no boundary loop");
  Points out;
  out.reserve(loops.front().size());
  for (auto v : loops.front()) out.push_back(positions[v]);
  return out;
}

}  // namespace morphoflow
