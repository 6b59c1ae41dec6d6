#include "morphoflow/coupling.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "morphoflow/errors.hpp"

namespace morphoflow {

void SimulationConfig::validate() const {
  if (!(omega > 0.0)) throw ParameterError("solver.omega must be positive");
  kernel.validate();
  elastic.validate();
  diffusion.validate();
  reaction.validate();
  yank.validate();
  varifold.validate();
  if (!(dt > 0.0)) throw ParameterError("time.dt must be positive");
  if (!(T >= dt)) throw ParameterError("time.T must be at least time.dt");
  if (output.every == 0) throw ParameterError("output.every must be at least 1");
  if (!(potential.radius > 0.0) || !(potential.height >= 0.0))
    throw ParameterError("potential radius must be positive and height non-negative");
}

std::size_t SimulationConfig::num_steps() const {
  return static_cast<std::size_t>(std::llround(T / dt));
}

DensityField make_initial_density(const SimulationConfig& config, const Mesh& mesh,
                                  const Vec2& center) {
  if (config.potential.height == 0.0) return DensityField::constant(mesh.num_nodes(), 0.0);
  return initial_potential(center, config.potential.radius, config.potential.height, mesh);
}

DensityField make_initial_density(const SimulationConfig& config, const Mesh& mesh) {
  return make_initial_density(config, mesh, config.potential.center);
}

namespace {

struct QuadratureData {
  Points where;
  Eigen::VectorXd weights;
  std::vector<QuadraturePoint> qps;
};

QuadratureData deformed_quadrature(const Mesh& mesh, const DeformationState& state) {
  QuadratureData d;
  d.qps = triangle_quadrature(mesh, state.positions);
  d.where.reserve(d.qps.size());
  d.weights.resize(static_cast<Eigen::Index>(d.qps.size()));
  for (std::size_t q = 0; q < d.qps.size(); ++q) {
    d.where.push_back(d.qps[q].position);
    d.weights[static_cast<Eigen::Index>(q)] = d.qps[q].weight;
  }
  return d;
}

// w_q Q(p(x_q)) with p interpolated linearly from its nodal values
Eigen::VectorXd weighted_yank_density(const Mesh& mesh, const QuadratureData& quad,
                                      const Eigen::VectorXd& p, const BumpProfile& profile) {
  Eigen::VectorXd wq(quad.weights.size());
  for (std::size_t q = 0; q < quad.qps.size(); ++q) {
    const auto& qp = quad.qps[q];
    const auto& t = mesh.triangles[qp.triangle];
    const double pq = qp.bary[0] * p[t[0]] + qp.bary[1] * p[t[1]] + qp.bary[2] * p[t[2]];
    wq[static_cast<Eigen::Index>(q)] = qp.weight * bump_eval(profile, pq);
  }
  return wq;
}

Eigen::VectorXd interleave(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::VectorXd out(2 * x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[2 * i] = x[i];
    out[2 * i + 1] = y[i];
  }
  return out;
}

Eigen::VectorXd yank_from_gradients(const KernelGradients& grads, const Eigen::VectorXd& wq) {
  return interleave(-(grads.dx.transpose() * wq), -(grads.dy.transpose() * wq));
}

}  // namespace

Eigen::VectorXd assemble_yank(const Mesh& mesh, const DeformationState& state,
                              const DensityField& tau, const BumpProfile& yank_profile,
                              const Points& points, const KernelSpec& kernel) {
  const Eigen::VectorXd p = eulerian_density(state, tau);
  const QuadratureData quad = deformed_quadrature(mesh, state);
  const Eigen::VectorXd wq = weighted_yank_density(mesh, quad, p, yank_profile);
  return yank_from_gradients(kernel_gradients(quad.where, points, kernel), wq);
}

Eigen::VectorXd solve_velocity(const Eigen::VectorXd& j, const Eigen::MatrixXd& gram,
                               const Eigen::MatrixXd& elastic, double omega) {
  if (!(omega > 0.0)) throw ParameterError("omega must be positive");
  const Eigen::Index n = gram.rows();
  if (gram.cols() != n || elastic.rows() != 2 * n || elastic.cols() != 2 * n || j.size() != 2 * n)
    throw ParameterError("velocity system dimensions do not match");
  if (j.isZero(0.0)) return Eigen::VectorXd::Zero(2 * n);

  Eigen::MatrixXd m = elastic;
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) {
      m(2 * r, 2 * c) += omega * gram(r, c);
      m(2 * r + 1, 2 * c + 1) += omega * gram(r, c);
    }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError("velocity system is not positive definite (assembly error?)");
  Eigen::VectorXd a = llt.solve(j);
  // two sweeps of iterative refinement
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXd r = j - m.selfadjointView<Eigen::Lower>() * a;
    a += llt.solve(r);
  }
  if (!a.allFinite()) throw NumericalError("velocity solve produced non-finite momenta");
  return a;
}

double gram_quadratic(const Eigen::MatrixXd& gram, const Eigen::VectorXd& a) {
  const Eigen::Index n = gram.rows();
  Eigen::Map<const Eigen::Matrix<double, 2, Eigen::Dynamic>> am(a.data(), 2, n);
  return (am * gram * am.transpose()).trace();
}

double velocity_objective(const Eigen::VectorXd& a, const Eigen::VectorXd& j,
                          const Eigen::MatrixXd& gram, const Eigen::MatrixXd& elastic,
                          double omega) {
  return 0.5 * omega * gram_quadratic(gram, a) + 0.5 * a.dot(elastic * a) - a.dot(j);
}

DeformationState advance_flow(const DeformationState& state, const VelocityField& v, double dt) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  const FieldSample s = eval_field(v, state.positions);
  DeformationState next = state;
  for (std::size_t i = 0; i < state.size(); ++i) {
    next.positions[i] = state.positions[i] + dt * s.values[i];
    next.grad[i] = (Mat2::Identity() + dt * s.jacobians[i]) * state.grad[i];
  }
  next.recompute_jacobians();
  next.time = state.time + dt;
  check_positive_jacobian(next);
  return next;
}

VelocitySolve compute_velocity(const Mesh& mesh, const DeformationState& state,
                               const DensityField& tau, const SimulationConfig& config) {
  VelocitySolve out;
  out.points = collapse_points(state.positions, 1e-9 * config.kernel.sigma).unique;
  const Eigen::VectorXd p = eulerian_density(state, tau);
  const QuadratureData quad = deformed_quadrature(mesh, state);
  const Eigen::VectorXd wq = weighted_yank_density(mesh, quad, p, config.yank);
  const auto np = static_cast<Eigen::Index>(out.points.size());
  if (wq.isZero(0.0)) {
    // Q(p) vanishes everywhere: j = 0 and the minimizer is v = 0
    out.yank = Eigen::VectorXd::Zero(2 * np);
    out.momenta = Eigen::VectorXd::Zero(2 * np);
    return out;
  }
  const KernelGradients grads = kernel_gradients(quad.where, out.points, config.kernel);
  out.yank = yank_from_gradients(grads, wq);
  out.elastic = assemble_elastic_matrix(grads, quad.weights, config.elastic);
  out.gram = gram_matrix(out.points, config.kernel);
  out.momenta = solve_velocity(out.yank, out.gram, out.elastic, config.omega);
  return out;
}

namespace {

StepDiagnostics diagnose(const Mesh& mesh, const DeformationState& state, const DensityField& tau,
                         const VelocitySolve* vs) {
  StepDiagnostics d;
  d.time = state.time;
  d.min_jacobian = state.min_jacobian();
  d.area = mesh_area(mesh, state.positions);
  d.mass = integrate_nodal(mesh, mesh.nodes, tau.values);
  if (vs != nullptr) {
    d.yank_norm = vs->yank.norm();
    d.work = vs->momenta.dot(vs->yank);
    d.v_norm2 = vs->gram.size() > 0 ? gram_quadratic(vs->gram, vs->momenta) : 0.0;
  }
  return d;
}

}  // namespace

Trajectory run_simulation(const SimulationConfig& config, const Mesh& mesh,
                          const DensityField& p0, const SnapshotSink& sink) {
  config.validate();
  if (p0.size() != mesh.num_nodes())
    throw ParameterError("initial potential length does not match the mesh");

  Trajectory traj;
  DeformationState state = DeformationState::identity(mesh);
  DensityField tau = p0;  // φ(0) = id, so τ(0) = p₀
  const std::size_t steps = config.num_steps();

  auto record = [&](std::size_t step) {
    Snapshot s{step, state.time, state, tau};
    if (sink) sink(s);
    traj.snapshots.push_back(std::move(s));
  };
  record(0);

  for (std::size_t step = 1; step <= steps; ++step) {
    const double t_next = static_cast<double>(step) * config.dt;
    try {
      VelocitySolve vs = compute_velocity(mesh, state, tau, config);
      traj.diagnostics.push_back(diagnose(mesh, state, tau, &vs));

      DeformationState next = advance_flow(state, vs.field(config.kernel), config.dt);
      next.time = t_next;
      DensityField next_tau = step_density(mesh, tau, next, config.diffusion, &config.reaction, config.dt);

      for (std::size_t k = 0; k < config.inner_iters; ++k) {
        const VelocitySolve vk = compute_velocity(mesh, next, next_tau, config);
        next = advance_flow(state, vk.field(config.kernel), config.dt);
        next.time = t_next;
        next_tau = step_density(mesh, tau, next, config.diffusion, &config.reaction, config.dt);
      }
      state = std::move(next);
      tau = std::move(next_tau);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "step " << step << " (t = " << t_next << "): " << e.what();
      throw SimulationError(msg.str(), step, std::move(traj));
    }
    if (step % config.output.every == 0 || step == steps) record(step);
  }
  traj.diagnostics.push_back(diagnose(mesh, state, tau, nullptr));
  return traj;
}

}  // namespace morphoflow
