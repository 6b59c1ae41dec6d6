#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "morphoflow/coupling.hpp"

namespace morphoflow {

/// Line-oriented `key = value` configuration with dotted keys. Blank lines and
/// lines starting with '#' are ignored; unknown keys and out-of-range values are
/// errors carrying the line number.
///
/// Keys and defaults:
///   solver.omega = 10            kernel.sigma = 0.2
///   elastic.lambda = 0           elastic.mu = 1
///   diffusion.rx = 0.025         diffusion.ry = 0.005
///   reaction.pmin = 0.01  reaction.pmax = 1  reaction.height = 0.5  reaction.shape = symmetric_bump
///   yank.pmin = 0.01      yank.pmax = 1      yank.height = 1        yank.shape = plateau_bump
///   time.dt = 0.25               time.T = 25
///   coupling.inner_iters = 0
///   mesh.semi_a = 1  mesh.semi_b = 0.6  mesh.edge = 0.08
///   potential.cx = -0.5  potential.cy = 0.3  potential.radius = 0.4  potential.height = 1
///   varifold.sigma = 0.3
///   output.dir = out             output.every = 1
SimulationConfig parse_config(const std::string& path);
SimulationConfig parse_config(std::istream& in);
SimulationConfig parse_config_text(const std::string& text);

/// Writes every key in canonical order; parse_config of the output reproduces `config`.
void write_config(std::ostream& out, const SimulationConfig& config);
std::string config_to_string(const SimulationConfig& config);

/// Canonical key list, in the order write_config emits them.
std::vector<std::string> config_keys();

}  // namespace morphoflow
