#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "morphoflow/cli.hpp"
#include "morphoflow/config.hpp"
#include "morphoflow/errors.hpp"
#include "morphoflow/io.hpp"

using namespace morphoflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "morphoflow_test_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// coarse and short so that every command here runs in well under a second
const char* kSmall =
    "mesh.edge = 0.15\n"
    "time.dt = 0.25\n"
    "time.T = 1.5\n";

fs::path write_cfg(const fs::path& dir, const std::string& extra) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << kSmall << extra;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> manifest_map(const fs::path& p) {
  std::map<std::string, std::string> m;
  for (auto& [k, v] : read_key_values(p)) m[k] = v;
  return m;
}

struct OutDir {
  explicit OutDir(const fs::path& p) { setenv("MORPHOFLOW_OUT", p.c_str(), 1); }
  ~OutDir() { unsetenv("MORPHOFLOW_OUT"); }
};

}  // namespace

TEST_CASE("grid spec parsing") {
  const GridSpec g = parse_grid_spec("-0.8:0.8:5,-1:1:3");
  CHECK(g.x0 == -0.8);
  CHECK(g.x1 == 0.8);
  CHECK(g.nx == 5);
  CHECK(g.y0 == -1.0);
  CHECK(g.ny == 3);
  CHECK_THROWS_AS(parse_grid_spec("0:1:3"), ParameterError);
  CHECK_THROWS_AS(parse_grid_spec("0:1:0,0:1:2"), ParameterError);
  CHECK_THROWS_AS(parse_grid_spec("0:1,0:1:2"), ParameterError);
  CHECK_THROWS_AS(parse_grid_spec("0:1:2x,0:1:2"), ParameterError);
}

TEST_CASE("lattice ordering") {
  const auto pts = lattice(0.0, 1.0, 3, -1.0, 1.0, 2);
  REQUIRE(pts.size() == 6);
  CHECK(pts[1] == Vec2(0.5, -1.0));
  CHECK(pts[3] == Vec2(0.0, 1.0));
  CHECK(lattice(2.0, 3.0, 1, 4.0, 5.0, 1).front() == Vec2(2.0, 4.0));
}

TEST_CASE("simulate writes snapshots, polylines and a checksummed manifest") {
  const fs::path dir = scratch("simulate");
  const fs::path cfg = write_cfg(dir, "output.every = 2\n");
  const OutDir env(dir / "out");
  std::ostringstream log, err;
  REQUIRE(cmd_simulate(cfg.string(), log, err) == 0);
  CHECK(err.str().empty());

  const auto m = manifest_map(dir / "out" / "manifest");
  CHECK(m.at("status") == "ok");
  CHECK(m.at("partial") == "false");
  CHECK(m.at("steps") == "6");
  CHECK(m.at("snapshots") == "4");  // steps 0, 2, 4, 6
  CHECK(m.at("all_jacobians_positive") == "true");
  CHECK(std::stod(m.at("min_jacobian")) > 0.0);
  CHECK(m.at("config.output.every") == "2");

  // every listed file exists with the recorded checksum
  std::size_t listed = 0;
  for (const auto& [k, v] : m) {
    if (k.rfind("file.", 0) != 0) continue;
    ++listed;
    const fs::path f = dir / "out" / k.substr(5);
    REQUIRE(fs::exists(f));
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", file_crc32(f));
    CHECK(v == buf);
  }
  CHECK(listed == 1 + 2 * 4);
  for (const char* f : {"step_0000.csv", "step_0006.csv", "boundary_0004.txt", "mesh.txt"})
    CHECK(fs::exists(dir / "out" / f));
  CHECK_FALSE(fs::exists(dir / "out" / "step_0001.csv"));

  // the echoed config parses back to the run's config
  std::ostringstream echo;
  for (const auto& key : config_keys()) echo << key << " = " << m.at("config." + key) << '\n';
  CHECK(config_to_string(parse_config_text(echo.str())) == config_to_string(parse_config(cfg.string())));

  // first snapshot sits on the reference mesh with p = τ
  std::ifstream mesh_in(dir / "out" / "mesh.txt");
  const Mesh mesh = read_mesh(mesh_in);
  const auto rows = read_snapshot_csv(dir / "out" / "step_0000.csv");
  REQUIRE(rows.size() == mesh.num_nodes());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].node == i);
    CHECK(Vec2(rows[i].x, rows[i].y) == mesh.nodes[i]);
    CHECK(rows[i].p == rows[i].tau);
  }
  const auto last = read_snapshot_csv(dir / "out" / "step_0006.csv");
  const Points poly = read_polyline(dir / "out" / "boundary_0006.txt");
  CHECK(poly.size() == mesh.boundary_edges.size());
  double max_p = 0.0;
  for (const auto& r : last) max_p = std::max(max_p, r.p);
  CHECK(max_p > 0.0);
}

TEST_CASE("zero potential leaves the boundary where it started") {
  const fs::path dir = scratch("zero");
  const fs::path cfg = write_cfg(dir, "potential.height = 0\n");
  const OutDir env(dir / "out");
  std::ostringstream log, err;
  REQUIRE(cmd_simulate(cfg.string(), log, err) == 0);
  const Points first = read_polyline(dir / "out" / "boundary_0000.txt");
  const Points last = read_polyline(dir / "out" / "boundary_0006.txt");
  REQUIRE(first.size() == last.size());
  double diff = 0.0;
  for (std::size_t i = 0; i < first.size(); ++i) diff = std::max(diff, (first[i] - last[i]).norm());
  CHECK(diff <= 1e-12);
}

TEST_CASE("reruns are byte identical") {
  const fs::path dir = scratch("rerun");
  const fs::path cfg = write_cfg(dir, "");
  std::ostringstream log, err;
  {
    const OutDir env(dir / "a");
    REQUIRE(cmd_simulate(cfg.string(), log, err) == 0);
  }
  {
    const OutDir env(dir / "b");
    REQUIRE(cmd_simulate(cfg.string(), log, err) == 0);
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest") continue;  // carries the wall time
    CHECK(slurp(entry.path()) == slurp(dir / "b" / name));
    ++compared;
  }
  CHECK(compared == 1 + 2 * 7);
  auto ma = manifest_map(dir / "a" / "manifest");
  auto mb = manifest_map(dir / "b" / "manifest");
  ma.erase("wall_time");
  mb.erase("wall_time");
  CHECK(ma == mb);
}

TEST_CASE("a folding run exits nonzero and flags its partial output") {
  const fs::path dir = scratch("fold");
  const fs::path cfg = write_cfg(dir, "solver.omega = 0.0001\ntime.dt = 5\ntime.T = 50\n");
  const OutDir env(dir / "out");
  std::ostringstream log, err;
  CHECK(cmd_simulate(cfg.string(), log, err) != 0);
  CHECK(err.str().rfind("error: kind=simulation message=", 0) == 0);
  CHECK(err.str().find('\n') == err.str().size() - 1);
  const auto m = manifest_map(dir / "out" / "manifest");
  CHECK(m.at("status") == "failed");
  CHECK(m.at("partial") == "true");
  CHECK(m.count("error") == 1);
  CHECK(fs::exists(dir / "out" / "step_0000.csv"));
}

TEST_CASE("configuration errors are reported with their kind") {
  const fs::path dir = scratch("badcfg");
  const fs::path cfg = dir / "bad.cfg";
  std::ofstream(cfg) << "time.dt = 0.25\nelastic.nu = 0.3\n";
  std::ostringstream log, err;
  CHECK(cmd_simulate(cfg.string(), log, err) == 1);
  CHECK(err.str().rfind("error: kind=config message=line 2: unknown key 'elastic.nu'", 0) == 0);
  std::ostringstream err2;
  CHECK(cmd_mesh((dir / "missing.cfg").string(), log, err2) == 1);
  CHECK(err2.str().rfind("error: kind=config", 0) == 0);
}

TEST_CASE("mesh command") {
  const fs::path dir = scratch("mesh");
  const fs::path cfg = write_cfg(dir, "");
  const OutDir env(dir / "out");
  std::ostringstream log, err;
  REQUIRE(cmd_mesh(cfg.string(), log, err) == 0);
  std::ifstream in(dir / "out" / "mesh.txt");
  const Mesh m = read_mesh(in);
  const Mesh ref = make_ellipse_mesh(1.0, 0.6, 0.15);
  CHECK(m.num_nodes() == ref.num_nodes());
  CHECK(m.triangles == ref.triangles);
}

TEST_CASE("gridsearch on a 3x3 grid around the truth") {
  const fs::path dir = scratch("grid");
  const fs::path cfg = write_cfg(dir, "");
  std::ostringstream log, err;
  const GridSpec grid = parse_grid_spec("-0.7:-0.3:3,0.1:0.5:3");
  {
    const OutDir env(dir / "one");
    REQUIRE(cmd_gridsearch(cfg.string(), grid, 1.5, 1, log, err) == 0);
  }
  {
    const OutDir env(dir / "three");
    REQUIRE(cmd_gridsearch(cfg.string(), grid, 1.5, 3, log, err) == 0);
  }
  const std::string csv = slurp(dir / "one" / "gridsearch.csv");
  CHECK(csv == slurp(dir / "three" / "gridsearch.csv"));  // job count does not matter
  CHECK(slurp(dir / "one" / "truth_boundary.txt") == slurp(dir / "three" / "truth_boundary.txt"));

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "cx,cy,distance");
  double best = INFINITY;
  Vec2 best_c;
  int rows = 0;
  while (std::getline(in, line)) {
    double cx, cy, d;
    char c1, c2;
    std::istringstream ls(line);
    REQUIRE(static_cast<bool>(ls >> cx >> c1 >> cy >> c2 >> d));
    ++rows;
    if (d < best) {
      best = d;
      best_c = Vec2(cx, cy);
    }
  }
  CHECK(rows == 9);
  CHECK((best_c - Vec2(-0.5, 0.3)).norm() < 1e-12);
  CHECK(best <= 1e-10);
}

TEST_CASE("candidates outside the body all score the same") {
  SimulationConfig c = parse_config_text(kSmall);
  const Mesh mesh = build_mesh(c);
  const auto centers = lattice(3.0, 4.0, 2, 3.0, 4.0, 2);
  const GridSearchResult r = grid_search_center(c, mesh, centers, 1.0, Vec2(-0.5, 0.3), 2);
  REQUIRE(r.rows.size() == 4);
  for (const auto& row : r.rows) {
    CHECK(row.ok);
    CHECK(row.distance == r.rows.front().distance);
  }
  CHECK(r.rows.front().distance > 0.0);
  CHECK_THROWS_AS(grid_search_center(c, mesh, {}, 1.0, Vec2(0, 0)), ParameterError);
  CHECK_THROWS_AS(grid_search_center(c, mesh, centers, 2.0, Vec2(0, 0)), ParameterError);
}
