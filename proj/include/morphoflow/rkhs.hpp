#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "morphoflow/types.hpp"

namespace morphoflow {

/// Scalar radial profile of the order-3 Matérn kernel,
///   κ(t) = (1 + t + 2t²/15 + t³/15) e^{-t},  t = |x − y| / σ.
/// The matrix-valued kernel is κ(|x − y|/σ) I₂.
struct KernelSpec {
  double sigma = 0.2;

  void validate() const;
};

double kappa(double t);

/// (κ'(t), κ''(t)).
std::pair<double, double> kappa_derivatives(double t);

/// κ'(t) / t, extended continuously to t = 0 (value −11/15).
double kappa_d1_over_t(double t);

/// ∇_q κ(|q − x| / σ).
Vec2 kernel_gradient(const Vec2& q, const Vec2& x, const KernelSpec& spec);

Eigen::MatrixXd gram_matrix(const Points& points, const KernelSpec& spec);

/// v(x) = Σ_i κ(|x − x_i|/σ) a_i.
struct VelocityField {
  KernelSpec spec;
  Points points;
  Points momenta;

  void validate() const;

  /// Momenta packed as [a_0x, a_0y, a_1x, ...].
  Eigen::VectorXd packed_momenta() const;
  static VelocityField from_packed(const KernelSpec& spec, Points points,
                                   const Eigen::VectorXd& packed);
};

struct FieldSample {
  Points values;
  std::vector<Mat2> jacobians;  // (Dv)_{de} = ∂_e v_d
};

FieldSample eval_field(const VelocityField& v, const Points& queries);

double v_norm_squared(const VelocityField& v);

/// ∂κ_i/∂x and ∂κ_i/∂y for every (query q, control point i) pair, as nq × np matrices.
struct KernelGradients {
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
};

KernelGradients kernel_gradients(const Points& queries, const Points& points,
                                 const KernelSpec& spec);

/// Control points with near-duplicates (distance < tol) merged into their first occurrence.
struct CollapsedPoints {
  Points unique;
  std::vector<std::size_t> representative;  // original index -> index into `unique`
};

CollapsedPoints collapse_points(const Points& points, double tol);

}  // namespace morphoflow
