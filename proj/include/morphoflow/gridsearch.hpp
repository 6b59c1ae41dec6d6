#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "morphoflow/coupling.hpp"
#include "morphoflow/varifold.hpp"

namespace morphoflow {

struct GridRow {
  Vec2 center;
  double distance = 0.0;
  bool ok = true;
  std::string error;
};

struct GridSearchResult {
  Curve truth_boundary;
  std::vector<GridRow> rows;  // same order as the requested centers
};

/// Boundary curve of the mesh at the given deformed positions.
Curve boundary_curve(const Mesh& mesh, const DeformationState& state);

/// Final deformed boundary of a run of `config` (up to config.T) from the potential centered at `center`.
Curve simulate_boundary(const SimulationConfig& config, const Mesh& mesh, const Vec2& center);

/// Simulates the ground truth and every candidate center up to T', all other
/// parameters fixed, and scores each candidate by the varifold distance of its
/// boundary to the ground truth boundary. A failed candidate is flagged in its row.
GridSearchResult grid_search_center(const SimulationConfig& base_config, const Mesh& mesh,
                                    const std::vector<Vec2>& centers, double t_prime,
                                    const Vec2& truth_center, std::size_t jobs = 1);

/// nx × ny lattice over [x0, x1] × [y0, y1], x varying fastest.
std::vector<Vec2> lattice(double x0, double x1, std::size_t nx, double y0, double y1, std::size_t ny);

}  // namespace morphoflow
