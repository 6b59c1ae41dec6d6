#include "morphoflow/gridsearch.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <thread>

#include "morphoflow/errors.hpp"

namespace morphoflow {

Curve boundary_curve(const Mesh& mesh, const DeformationState& state) {
  return Curve(boundary_polyline(mesh, state.positions));
}

Curve simulate_boundary(const SimulationConfig& config, const Mesh& mesh, const Vec2& center) {
  SimulationConfig cfg = config;
  cfg.potential.center = center;
  cfg.output.every = cfg.num_steps();
  const DensityField p0 = make_initial_density(cfg, mesh, center);
  const Trajectory traj = run_simulation(cfg, mesh, p0);
  return boundary_curve(mesh, traj.snapshots.back().state);
}

GridSearchResult grid_search_center(const SimulationConfig& base_config, const Mesh& mesh,
                                    const std::vector<Vec2>& centers, double t_prime,
                                    const Vec2& truth_center, std::size_t jobs) {
  if (centers.empty()) throw ParameterError("grid search needs at least one center");
  if (!(t_prime > 0.0) || t_prime > base_config.T + 1e-12)
    throw ParameterError("T' must lie in (0, time.T]");
  SimulationConfig cfg = base_config;
  cfg.T = t_prime;
  cfg.validate();

  GridSearchResult result;
  result.truth_boundary = simulate_boundary(cfg, mesh, truth_center);
  result.rows.resize(centers.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < centers.size(); k = next++) {
      GridRow& row = result.rows[k];
      row.center = centers[k];
      try {
        const Curve c = simulate_boundary(cfg, mesh, centers[k]);
        row.distance = varifold_distance(c, result.truth_boundary, cfg.varifold);
      } catch (const std::exception& e) {
        row.ok = false;
        row.distance = std::numeric_limits<double>::quiet_NaN();
        row.error = e.what();
      }
    }
  };
  const std::size_t n_workers = std::clamp<std::size_t>(jobs, 1, centers.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return result;
}

std::vector<Vec2> lattice(double x0, double x1, std::size_t nx, double y0, double y1, std::size_t ny) {
  if (nx == 0 || ny == 0) throw ParameterError("grid needs at least one point per axis");
  auto coord = [](double a, double b, std::size_t n, std::size_t i) {
    return n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  std::vector<Vec2> pts;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) pts.emplace_back(coord(x0, x1, nx, i), coord(y0, y1, ny, j));
  return pts;
}

}  // namespace morphoflow
