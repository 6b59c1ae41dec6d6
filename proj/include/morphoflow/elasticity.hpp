#pragma once

#include <Eigen/Core>

#include "morphoflow/geometry.hpp"
#include "morphoflow/rkhs.hpp"

namespace morphoflow {

/// Lamé parameters of the isotropic, homogeneous material.
struct ElasticParams {
  double lambda = 0.0;
  double mu = 1.0;

  void validate() const;
};

/// Isotropic strain energy density pairing λ tr(ε_v) tr(ε_w) + 2μ tr(ε_vᵀ ε_w).
double strain_energy_density(const Mat2& dv, const Mat2& dw, const ElasticParams& params);

/// (A_φ v | w) integrated over the deformed domain φ(M_0).
double elastic_pairing(const Mesh& mesh, const DeformationState& state,
                       const ElasticParams& params, const VelocityField& v,
                       const VelocityField& w);

/// Galerkin matrix of A_φ on the kernel basis {κ(|· − x_i|/σ) e_d}, indexed 2i + d.
/// Symmetric positive semi-definite by construction.
Eigen::MatrixXd assemble_elastic_matrix(const Mesh& mesh, const DeformationState& state,
                                        const ElasticParams& params, const Points& points,
                                        const KernelSpec& kernel);

/// Same assembly from precomputed kernel gradients at the deformed quadrature points.
Eigen::MatrixXd assemble_elastic_matrix(const KernelGradients& grads,
                                        const Eigen::VectorXd& weights,
                                        const ElasticParams& params);

}  // namespace morphoflow
