#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "morphoflow/coupling.hpp"

namespace morphoflow {

/// `x0:x1:nx,y0:y1:ny`
struct GridSpec {
  double x0 = -0.8, x1 = 0.8;
  std::size_t nx = 5;
  double y0 = -0.8, y1 = 0.8;
  std::size_t ny = 5;
};

GridSpec parse_grid_spec(const std::string& text);

/// config.output.dir, unless MORPHOFLOW_OUT is set.
std::filesystem::path resolve_output_dir(const SimulationConfig& config);

Mesh build_mesh(const SimulationConfig& config);

/// Each command returns a process exit code; failures print one
/// `error: kind=<kind> message=<text>` line to `err`.
int cmd_simulate(const std::string& config_path, std::ostream& log, std::ostream& err);
int cmd_gridsearch(const std::string& config_path, const GridSpec& grid, double t_prime,
                   std::size_t jobs, std::ostream& log, std::ostream& err);
int cmd_mesh(const std::string& config_path, std::ostream& log, std::ostream& err);

}  // namespace morphoflow
