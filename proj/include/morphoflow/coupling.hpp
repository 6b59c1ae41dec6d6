#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "morphoflow/elasticity.hpp"
#include "morphoflow/geometry.hpp"
#include "morphoflow/reaction_diffusion.hpp"
#include "morphoflow/rkhs.hpp"
#include "morphoflow/varifold.hpp"

namespace morphoflow {

struct MeshSpec {
  double semi_a = 1.0;
  double semi_b = 0.6;
  double edge = 0.08;
};

/// Initial potential h (|x − c|²/r² − 1)² on B(c, r).
struct PotentialSpec {
  Vec2 center{-0.5, 0.3};
  double radius = 0.4;
  double height = 1.0;
};

struct OutputSpec {
  std::string dir = "out";
  std::size_t every = 1;  // snapshot cadence in steps
};

struct SimulationConfig {
  double omega = 10.0;
  KernelSpec kernel{};
  ElasticParams elastic{};
  DiffusionSpec diffusion{};
  BumpProfile reaction{0.01, 1.0, 0.5, BumpShape::symmetric_bump};
  BumpProfile yank{0.01, 1.0, 1.0, BumpShape::plateau_bump};
  double dt = 0.25;
  double T = 25.0;
  std::size_t inner_iters = 0;
  MeshSpec mesh{};
  PotentialSpec potential{};
  VarifoldSpec varifold{};
  OutputSpec output{};

  void validate() const;
  std::size_t num_steps() const;
};

/// Initial potential from config.potential (centered at `center` when given);
/// a zero height yields the zero field.
DensityField make_initial_density(const SimulationConfig& config, const Mesh& mesh);
DensityField make_initial_density(const SimulationConfig& config, const Mesh& mesh, const Vec2& center);

/// Dual vector (j | κ_i e_d) = ∫_{φ(M_0)} Q(p) (−∂_d κ_i), indexed 2i + d.
Eigen::VectorXd assemble_yank(const Mesh& mesh, const DeformationState& state,
                              const DensityField& tau, const BumpProfile& yank_profile,
                              const Points& points, const KernelSpec& kernel);

/// Momenta a solving (ω G ⊗ I₂ + A) a = j, the minimizer of
/// (ω/2) aᵀGa + ½ aᵀAa − aᵀj. Throws NumericalError if the system is not positive definite.
Eigen::VectorXd solve_velocity(const Eigen::VectorXd& j, const Eigen::MatrixXd& gram,
                               const Eigen::MatrixXd& elastic, double omega);

/// Discrete objective (ω/2) aᵀ(G⊗I)a + ½ aᵀAa − aᵀj.
double velocity_objective(const Eigen::VectorXd& a, const Eigen::VectorXd& j,
                          const Eigen::MatrixXd& gram, const Eigen::MatrixXd& elastic,
                          double omega);

/// aᵀ (G ⊗ I₂) a.
double gram_quadratic(const Eigen::MatrixXd& gram, const Eigen::VectorXd& a);

/// Forward Euler on φ and on Dφ: x ← x + dt v(x), Dφ ← (I + dt Dv(x)) Dφ.
DeformationState advance_flow(const DeformationState& state, const VelocityField& v, double dt);

/// Velocity for the current (state, τ), with the intermediate quantities kept for checks.
struct VelocitySolve {
  Points points;
  Eigen::VectorXd yank;
  Eigen::MatrixXd gram;
  Eigen::MatrixXd elastic;
  Eigen::VectorXd momenta;

  VelocityField field(const KernelSpec& kernel) const {
    return VelocityField::from_packed(kernel, points, momenta);
  }
};

VelocitySolve compute_velocity(const Mesh& mesh, const DeformationState& state,
                               const DensityField& tau, const SimulationConfig& config);

struct StepDiagnostics {
  double time = 0.0;
  double yank_norm = 0.0;
  double v_norm2 = 0.0;       // aᵀ G a
  double work = 0.0;          // aᵀ j
  double min_jacobian = 1.0;
  double area = 0.0;
  double mass = 0.0;          // ∫_{M_0} τ
};

struct Snapshot {
  std::size_t step = 0;
  double time = 0.0;
  DeformationState state;
  DensityField tau;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<StepDiagnostics> diagnostics;  // state entering each step, then the final state
};

using SnapshotSink = std::function<void(const Snapshot&)>;

/// Thrown when a run aborts; everything recorded so far travels with it.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, std::size_t step, Trajectory partial)
      : std::runtime_error(what), step_(step), partial_(std::move(partial)) {}
  std::size_t step() const noexcept { return step_; }
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  std::size_t step_;
  Trajectory partial_;
};

/// Runs yank → velocity → flow → density for config.num_steps() steps.
/// Snapshots at t = 0, every config.output.every steps and at the final step are
/// kept in the trajectory and passed to `sink` as they are produced.
Trajectory run_simulation(const SimulationConfig& config, const Mesh& mesh,
                          const DensityField& p0, const SnapshotSink& sink = {});

}  // namespace morphoflow
