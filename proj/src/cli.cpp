#include "morphoflow/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "morphoflow/config.hpp"
#include "morphoflow/errors.hpp"
#include "morphoflow/gridsearch.hpp"
#include "morphoflow/io.hpp"

namespace morphoflow {

namespace fs = std::filesystem;

namespace {

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const SimulationError*>(&e)) return "simulation";
  if (dynamic_cast<const DegenerateDeformationError*>(&e)) return "degenerate_deformation";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical";
  if (dynamic_cast<const ParameterError*>(&e)) return "parameter";
  return "runtime";
}

int report(std::ostream& err, const std::exception& e) {
  std::string msg = e.what();
  for (auto& ch : msg)
    if (ch == '\n') ch = ' ';
  err << "error: kind=" << error_kind(e) << " message=" << msg << std::endl;
  return 1;
}

std::string numbered(const char* prefix, std::size_t step, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu%s", prefix, step, ext);
  return buf;
}

}  // namespace

GridSpec parse_grid_spec(const std::string& text) {
  GridSpec g;
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ParameterError("grid spec must look like x0:x1:nx,y0:y1:ny");
  auto axis = [](const std::string& s, double& a, double& b, std::size_t& n) {
    std::istringstream ss(s);
    char c1 = 0, c2 = 0;
    long long count = 0;
    if (!(ss >> a >> c1 >> b >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1 ||
        !(ss >> std::ws).eof())
      throw ParameterError("bad grid axis '" + s + "', expected lo:hi:count");
    n = static_cast<std::size_t>(count);
  };
  axis(text.substr(0, comma), g.x0, g.x1, g.nx);
  axis(text.substr(comma + 1), g.y0, g.y1, g.ny);
  return g;
}

fs::path resolve_output_dir(const SimulationConfig& config) {
  if (const char* env = std::getenv("MORPHOFLOW_OUT"); env != nullptr && *env != '\0') return env;
  return config.output.dir;
}

Mesh build_mesh(const SimulationConfig& config) {
  return make_ellipse_mesh(config.mesh.semi_a, config.mesh.semi_b, config.mesh.edge);
}

int cmd_simulate(const std::string& config_path, std::ostream& log, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest manifest;
  fs::path dir;
  Mesh mesh;
  try {
    const SimulationConfig cfg = parse_config(config_path);
    manifest.config_echo = config_to_string(cfg);
    dir = resolve_output_dir(cfg);
    fs::create_directories(dir);
    mesh = build_mesh(cfg);
    {
      std::ofstream m(dir / "mesh.txt");
      write_mesh(m, mesh);
    }
    manifest.files.emplace_back("mesh.txt", file_crc32(dir / "mesh.txt"));

    auto sink = [&](const Snapshot& s) {
      const std::string csv = numbered("step", s.step, ".csv");
      const std::string poly = numbered("boundary", s.step, ".txt");
      write_snapshot_csv(dir / csv, s);
      write_polyline(dir / poly, boundary_polyline(mesh, s.state.positions));
      manifest.files.emplace_back(csv, file_crc32(dir / csv));
      manifest.files.emplace_back(poly, file_crc32(dir / poly));
      manifest.snapshot_count++;
      manifest.step_count = s.step;
      manifest.min_jacobian = std::min(manifest.min_jacobian, s.state.min_jacobian());
    };
    const Trajectory traj = run_simulation(cfg, mesh, make_initial_density(cfg, mesh), sink);
    for (const auto& d : traj.diagnostics) manifest.min_jacobian = std::min(manifest.min_jacobian, d.min_jacobian);
    manifest.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / "manifest", manifest);
    log << "simulate: " << manifest.snapshot_count << " snapshots, " << manifest.step_count
        << " steps, min Jacobian " << manifest.min_jacobian << " -> " << dir.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    if (!dir.empty()) {
      manifest.status = "failed";
      manifest.partial = true;
      manifest.error = e.what();
      manifest.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      try {
        write_manifest(dir / "manifest", manifest);
      } catch (...) {
      }
    }
    return report(err, e);
  }
}

int cmd_gridsearch(const std::string& config_path, const GridSpec& grid, double t_prime,
                   std::size_t jobs, std::ostream& log, std::ostream& err) {
  try {
    const SimulationConfig cfg = parse_config(config_path);
    const fs::path dir = resolve_output_dir(cfg);
    fs::create_directories(dir);
    const Mesh mesh = build_mesh(cfg);
    const auto centers = lattice(grid.x0, grid.x1, grid.nx, grid.y0, grid.y1, grid.ny);
    const auto result = grid_search_center(cfg, mesh, centers, t_prime, cfg.potential.center, jobs);
    write_landscape_csv(dir / "gridsearch.csv", result.rows);
    write_polyline(dir / "truth_boundary.txt", result.truth_boundary.vertices);
    std::size_t failed = 0;
    for (const auto& r : result.rows)
      if (!r.ok) {
        ++failed;
        err << "warning: center (" << r.center.x() << ", " << r.center.y() << ") failed: " << r.error << '\n';
      }
    log << "gridsearch: " << result.rows.size() << " centers (" << failed << " failed) -> "
        << (dir / "gridsearch.csv").string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    return report(err, e);
  }
}

int cmd_mesh(const std::string& config_path, std::ostream& log, std::ostream& err) {
  try {
    const SimulationConfig cfg = parse_config(config_path);
    const fs::path dir = resolve_output_dir(cfg);
    fs::create_directories(dir);
    const Mesh mesh = build_mesh(cfg);
    std::ofstream out(dir / "mesh.txt");
    write_mesh(out, mesh);
    log << "mesh: " << mesh.num_nodes() << " nodes, " << mesh.num_triangles() << " triangles -> "
        << (dir / "mesh.txt").string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    return report(err, e);
  }
}

}  // namespace morphoflow
