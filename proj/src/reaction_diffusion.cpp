#include "morphoflow/reaction_diffusion.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>

#include "morphoflow/errors.hpp"

namespace morphoflow {

void DiffusionSpec::validate() const {
  if (!(rx > 0.0) || !(ry > 0.0)) throw ParameterError("diffusion rates must be positive");
}

void BumpProfile::validate() const {
  if (!(p_max > p_min)) throw ParameterError("bump support must satisfy p_min < p_max");
  if (!(height >= 0.0)) throw ParameterError("bump height must be non-negative");
}

namespace {

double smoothstep5(double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }

}  // namespace

double bump_eval(const BumpProfile& profile, double p) {
  if (!(p > profile.p_min) || !(p < profile.p_max)) return 0.0;
  const double u = (p - profile.p_min) / (profile.p_max - profile.p_min);
  switch (profile.shape) {
    case BumpShape::symmetric_bump: {
      const double b = 4.0 * u * (1.0 - u);
      return profile.height * b * b * b;
    }
    case BumpShape::plateau_bump: {
      constexpr double ramp = 0.2;
      if (u < ramp) return profile.height * smoothstep5(u / ramp);
      if (u > 1.0 - ramp) return profile.height * smoothstep5((1.0 - u) / ramp);
      return profile.height;
    }
  }
  return 0.0;
}

std::vector<Mat2> pullback_diffusion(const Mesh& mesh, const DeformationState& state,
                                     const DiffusionSpec& spec) {
  spec.validate();
  const Mat2 s = Eigen::Vector2d(spec.rx, spec.ry).asDiagonal();
  std::vector<Mat2> out;
  out.reserve(mesh.num_triangles());
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const auto& t = mesh.triangles[e];
    const Mat2 f = (state.grad[t[0]] + state.grad[t[1]] + state.grad[t[2]]) / 3.0;
    const double det = f.determinant();
    if (!(det > 0.0)) {
      std::ostringstream msg;
      msg << "singular deformation gradient on element " << e << " (det " << det << ")";
      throw DegenerateDeformationError(msg.str(), t[0], det);
    }
    const Mat2 finv = f.inverse();
    const Mat2 pulled = finv * s * finv.transpose();
    out.push_back(0.5 * (pulled + pulled.transpose()));
  }
  return out;
}

RdSystem assemble_rd_system(const Mesh& mesh, const DeformationState& state,
                            const DiffusionSpec& spec) {
  check_positive_jacobian(state);
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  const auto tensors = pullback_diffusion(mesh, state, spec);

  Eigen::VectorXd log_j(n);
  for (Eigen::Index i = 0; i < n; ++i) log_j[i] = std::log(state.jac[static_cast<std::size_t>(i)]);
  const auto g = recover_gradient(log_j, mesh);

  std::vector<Eigen::Triplet<double>> k_trip, d_trip;
  k_trip.reserve(9 * mesh.num_triangles());
  d_trip.reserve(9 * mesh.num_triangles());
  RdSystem sys;
  sys.lumped_mass = Eigen::VectorXd::Zero(n);
  sys.reference_mass = Eigen::VectorXd::Zero(n);

  const auto qps = triangle_quadrature(mesh, mesh.nodes);
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const auto& t = mesh.triangles[e];
    const Vec2& a = mesh.nodes[t[0]];
    const Vec2& b = mesh.nodes[t[1]];
    const Vec2& c = mesh.nodes[t[2]];
    const double area = signed_area(a, b, c);
    std::array<Vec2, 3> grad_psi{Vec2((b - c).y(), (c - b).x()), Vec2((c - a).y(), (a - c).x()),
                                 Vec2((a - b).y(), (b - a).x())};
    for (auto& gp : grad_psi) gp /= 2.0 * area;
    const Mat2& sp = tensors[e];

    std::array<double, 3> k_loc_j{};  // ∫_e J ψ_i for the lumped mass
    double int_j = 0.0;
    for (int q = 0; q < 3; ++q) {
      const auto& qp = qps[3 * e + static_cast<std::size_t>(q)];
      double jq = 0.0;
      Vec2 gq = Vec2::Zero();
      for (int k = 0; k < 3; ++k) {
        jq += qp.bary[k] * state.jac[t[k]];
        gq += qp.bary[k] * g[t[k]];
      }
      int_j += qp.weight * jq;
      const Vec2 flux = jq * (sp * gq);
      for (int i = 0; i < 3; ++i) {
        k_loc_j[i] += qp.weight * jq * qp.bary[i];
        const double fi = flux.dot(grad_psi[i]);
        for (int j = 0; j < 3; ++j) d_trip.emplace_back(t[i], t[j], -qp.weight * qp.bary[j] * fi);
      }
    }
    for (int i = 0; i < 3; ++i) {
      sys.lumped_mass[t[i]] += k_loc_j[i];
      sys.reference_mass[t[i]] += area / 3.0;
      for (int j = 0; j < 3; ++j)
        k_trip.emplace_back(t[i], t[j], int_j * grad_psi[i].dot(sp * grad_psi[j]));
    }
  }
  sys.stiffness.resize(n, n);
  sys.stiffness.setFromTriplets(k_trip.begin(), k_trip.end());
  sys.drift.resize(n, n);
  sys.drift.setFromTriplets(d_trip.begin(), d_trip.end());
  return sys;
}

struct DensityStepper::Solver {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

DensityStepper::DensityStepper(const Mesh& mesh, const DeformationState& state,
                               const DiffusionSpec& spec, double dt)
    : system_(assemble_rd_system(mesh, state, spec)),
      jac_(state.jac),
      dt_(dt),
      solver_(std::make_unique<Solver>()) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  Eigen::SparseMatrix<double> lhs = system_.stiffness + system_.drift;
  for (Eigen::Index i = 0; i < lhs.rows(); ++i) lhs.coeffRef(i, i) += system_.reference_mass[i] / dt;
  lhs.makeCompressed();
  solver_->lu.compute(lhs);
  if (solver_->lu.info() != Eigen::Success)
    throw NumericalError("density system factorization failed: " + solver_->lu.lastErrorMessage());
}

DensityStepper::~DensityStepper() = default;
DensityStepper::DensityStepper(DensityStepper&&) noexcept = default;
DensityStepper& DensityStepper::operator=(DensityStepper&&) noexcept = default;

DensityField DensityStepper::step(const DensityField& tau, const BumpProfile* reaction) const {
  const Eigen::Index n = system_.reference_mass.size();
  if (tau.values.size() != n) throw ParameterError("density length does not match the system");
  Eigen::VectorXd rhs = system_.reference_mass.cwiseProduct(tau.values) / dt_;
  if (reaction != nullptr) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double j = jac_[static_cast<std::size_t>(i)];
      rhs[i] += system_.lumped_mass[i] * bump_eval(*reaction, tau.values[i] / j);
    }
  }
  Eigen::VectorXd next = solver_->lu.solve(rhs);
  if (solver_->lu.info() != Eigen::Success || !next.allFinite())
    throw NumericalError("density solve failed");
  return DensityField(std::move(next));
}

DensityField step_density(const Mesh& mesh, const DensityField& tau, const DeformationState& state,
                          const DiffusionSpec& spec, const BumpProfile* reaction, double dt) {
  return DensityStepper(mesh, state, spec, dt).step(tau, reaction);
}

double lagrangian_mass(const RdSystem& system, const DensityField& tau) {
  return system.reference_mass.dot(tau.values);
}

DensityField initial_potential(const Vec2& center, double radius, double height, const Mesh& mesh) {
  if (!(radius > 0.0) || !(height > 0.0))
    throw ParameterError("potential radius and height must be positive");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const double s = (mesh.nodes[i] - center).squaredNorm() / (radius * radius);
    if (s < 1.0) v[static_cast<Eigen::Index>(i)] = height * (s - 1.0) * (s - 1.0);
  }
  return DensityField(std::move(v));
}

}  // namespace morphoflow
