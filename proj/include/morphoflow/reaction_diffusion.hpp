#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "morphoflow/geometry.hpp"

namespace morphoflow {

/// Eulerian diffusion rates along x and y: S = diag(rx, ry).
struct DiffusionSpec {
  double rx = 0.025;
  double ry = 0.005;

  void validate() const;
};

enum class BumpShape { symmetric_bump, plateau_bump };

/// C² piecewise polynomial supported on [p_min, p_max]; zero with its first two
/// derivatives at both ends.
///   symmetric_bump: height · (4u(1−u))³
///   plateau_bump:   height · smoothstep5 ramp up on u ∈ [0, 0.2], 1 on [0.2, 0.8], ramp down on [0.8, 1]
/// with u = (p − p_min) / (p_max − p_min).
struct BumpProfile {
  double p_min = 0.01;
  double p_max = 1.0;
  double height = 1.0;
  BumpShape shape = BumpShape::symmetric_bump;

  void validate() const;
  /// ‖profile‖_∞
  double sup() const { return height; }
};

double bump_eval(const BumpProfile& profile, double p);

/// Per-element pulled-back tensor Dφ⁻¹ S Dφ⁻ᵀ using the element-averaged nodal Dφ.
std::vector<Mat2> pullback_diffusion(const Mesh& mesh, const DeformationState& state,
                                     const DiffusionSpec& spec);

/// Piecewise-linear Galerkin operators on the reference mesh for the Lagrangian
/// density equation  ∂τ/∂t = div(J 𝐒 (∇τ − τ ∇J/J)) + R(τ/J) J.
struct RdSystem {
  Eigen::SparseMatrix<double> stiffness;  // ∫ J (𝐒∇ψ_j)·∇ψ_i
  Eigen::SparseMatrix<double> drift;      // −∫ ψ_j J (𝐒 g)·∇ψ_i, g = ∇ log J
  Eigen::VectorXd lumped_mass;            // ∫ J ψ_i
  Eigen::VectorXd reference_mass;         // ∫ ψ_i
};

RdSystem assemble_rd_system(const Mesh& mesh, const DeformationState& state,
                            const DiffusionSpec& spec);

/// Semi-implicit stepper for a frozen deformation state: diffusion and drift
/// implicit, reaction explicit,
///   (M₀/dt + K + D) τⁿ⁺¹ = M₀/dt τⁿ + M_J R(τⁿ/J).
/// The factorization is reused across steps.
class DensityStepper {
 public:
  DensityStepper(const Mesh& mesh, const DeformationState& state, const DiffusionSpec& spec,
                 double dt);
  ~DensityStepper();
  DensityStepper(DensityStepper&&) noexcept;
  DensityStepper& operator=(DensityStepper&&) noexcept;

  DensityField step(const DensityField& tau, const BumpProfile* reaction) const;
  const RdSystem& system() const { return system_; }
  double dt() const { return dt_; }

 private:
  struct Solver;
  RdSystem system_;
  std::vector<double> jac_;
  double dt_;
  std::unique_ptr<Solver> solver_;
};

/// One step of the density equation on `state`. A null reaction means R ≡ 0.
DensityField step_density(const Mesh& mesh, const DensityField& tau, const DeformationState& state,
                          const DiffusionSpec& spec, const BumpProfile* reaction, double dt);

/// Σ_i ∫ψ_i τ_i, the discrete Lagrangian mass ∫_{M_0} τ.
double lagrangian_mass(const RdSystem& system, const DensityField& tau);

/// Nodal samples of h (|x − c|²/r² − 1)² on the ball B(c, r), zero outside.
DensityField initial_potential(const Vec2& center, double radius, double height, const Mesh& mesh);

}  // namespace morphoflow
