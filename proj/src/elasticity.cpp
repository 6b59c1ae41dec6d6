#include "morphoflow/elasticity.hpp"

#include <cmath>

#include "morphoflow/errors.hpp"

namespace morphoflow {

void ElasticParams::validate() const {
  if (!(mu > 0.0)) throw ParameterError("elastic.mu must be positive");
  if (!(lambda >= 0.0)) throw ParameterError("elastic.lambda must be non-negative");
}

double strain_energy_density(const Mat2& dv, const Mat2& dw, const ElasticParams& params) {
  const Mat2 ev = 0.5 * (dv + dv.transpose());
  const Mat2 ew = 0.5 * (dw + dw.transpose());
  return params.lambda * ev.trace() * ew.trace() + 2.0 * params.mu * (ev.transpose() * ew).trace();
}

double elastic_pairing(const Mesh& mesh, const DeformationState& state,
                       const ElasticParams& params, const VelocityField& v,
                       const VelocityField& w) {
  params.validate();
  check_positive_jacobian(state);
  const auto qps = triangle_quadrature(mesh, state.positions);
  Points where;
  where.reserve(qps.size());
  for (const auto& q : qps) where.push_back(q.position);
  const FieldSample sv = eval_field(v, where);
  const FieldSample sw = eval_field(w, where);
  double total = 0.0;
  for (std::size_t q = 0; q < qps.size(); ++q)
    total += qps[q].weight * strain_energy_density(sv.jacobians[q], sw.jacobians[q], params);
  return total;
}

// Basis field (i, d) has Dv = e_d ⊗ ∇κ_i, so with g = ∇κ_i:
//   d = x: ε = [[g_x, g_y/2], [g_y/2, 0]],  d = y: ε = [[0, g_x/2], [g_x/2, g_y]].
// Writing P_ab = Σ_q w_q (∂_a κ_i)(∂_b κ_j) gives the blocks
//   A_xx = (λ+2μ) P_xx + μ P_yy,  A_yy = (λ+2μ) P_yy + μ P_xx,  A_xy = λ P_xy + μ P_yx.
Eigen::MatrixXd assemble_elastic_matrix(const KernelGradients& grads,
                                        const Eigen::VectorXd& weights,
                                        const ElasticParams& params) {
  params.validate();
  const Eigen::Index np = grads.dx.cols();
  const Eigen::VectorXd sw = weights.cwiseSqrt();
  const Eigen::MatrixXd wx = sw.asDiagonal() * grads.dx;
  const Eigen::MatrixXd wy = sw.asDiagonal() * grads.dy;

  Eigen::MatrixXd pxx = Eigen::MatrixXd::Zero(np, np);
  Eigen::MatrixXd pyy = Eigen::MatrixXd::Zero(np, np);
  pxx.selfadjointView<Eigen::Lower>().rankUpdate(wx.transpose());
  pyy.selfadjointView<Eigen::Lower>().rankUpdate(wy.transpose());
  const Eigen::MatrixXd pxy = wx.transpose() * wy;

  const double lam = params.lambda, mu = params.mu;
  Eigen::MatrixXd a(2 * np, 2 * np);
  for (Eigen::Index j = 0; j < np; ++j) {
    for (Eigen::Index i = j; i < np; ++i) {
      const double xx = (lam + 2.0 * mu) * pxx(i, j) + mu * pyy(i, j);
      const double yy = (lam + 2.0 * mu) * pyy(i, j) + mu * pxx(i, j);
      const double xy = lam * pxy(i, j) + mu * pxy(j, i);  // (i,x),(j,y)
      const double yx = lam * pxy(j, i) + mu * pxy(i, j);  // (i,y),(j,x)
      a(2 * i, 2 * j) = xx;
      a(2 * j, 2 * i) = xx;
      a(2 * i + 1, 2 * j + 1) = yy;
      a(2 * j + 1, 2 * i + 1) = yy;
      a(2 * i, 2 * j + 1) = xy;
      a(2 * j + 1, 2 * i) = xy;
      a(2 * i + 1, 2 * j) = yx;
      a(2 * j, 2 * i + 1) = yx;
    }
  }
  return a;
}

Eigen::MatrixXd assemble_elastic_matrix(const Mesh& mesh, const DeformationState& state,
                                        const ElasticParams& params, const Points& points,
                                        const KernelSpec& kernel) {
  check_positive_jacobian(state);
  const auto qps = triangle_quadrature(mesh, state.positions);
  Points where;
  Eigen::VectorXd w(static_cast<Eigen::Index>(qps.size()));
  where.reserve(qps.size());
  for (std::size_t q = 0; q < qps.size(); ++q) {
    where.push_back(qps[q].position);
    w[static_cast<Eigen::Index>(q)] = qps[q].weight;
  }
  return assemble_elastic_matrix(kernel_gradients(where, points, kernel), w, params);
}

}  // namespace morphoflow
