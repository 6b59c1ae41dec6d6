#include "morphoflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <zlib.h>

#include "morphoflow/errors.hpp"

namespace morphoflow {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  return in;
}

}  // namespace

void write_snapshot_csv(const fs::path& path, const Snapshot& snap) {
  auto out = open_out(path);
  out << "node,x,y,tau,p\n";
  for (std::size_t i = 0; i < snap.state.size(); ++i) {
    const double tau = snap.tau.values[static_cast<Eigen::Index>(i)];
    out << i << ',' << format_number(snap.state.positions[i].x()) << ','
        << format_number(snap.state.positions[i].y()) << ',' << format_number(tau) << ','
        << format_number(tau / snap.state.jac[i]) << '\n';
  }
}

std::vector<SnapshotRow> read_snapshot_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "node,x,y,tau,p")
    throw std::runtime_error("'" + path.string() + "' is not a snapshot CSV");
  std::vector<SnapshotRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    SnapshotRow r{};
    char c1, c2, c3, c4;
    if (!(ss >> r.node >> c1 >> r.x >> c2 >> r.y >> c3 >> r.tau >> c4 >> r.p))
      throw std::runtime_error("malformed snapshot row in '" + path.string() + "'");
    rows.push_back(r);
  }
  return rows;
}

void write_polyline(const fs::path& path, const Points& pts) {
  auto out = open_out(path);
  for (const auto& p : pts) out << format_number(p.x()) << ' ' << format_number(p.y()) << '\n';
}

Points read_polyline(const fs::path& path) {
  auto in = open_in(path);
  Points pts;
  double x, y;
  while (in >> x >> y) pts.emplace_back(x, y);
  return pts;
}

void write_landscape_csv(const fs::path& path, const std::vector<GridRow>& rows) {
  auto out = open_out(path);
  out << "cx,cy,distance\n";
  for (const auto& r : rows)
    out << format_number(r.center.x()) << ',' << format_number(r.center.y()) << ','
        << format_number(r.ok ? r.distance : std::nan("")) << '\n';
}

std::uint32_t file_crc32(const fs::path& path) {
  auto in = open_in(path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

void write_manifest(const fs::path& path, const RunManifest& m) {
  auto out = open_out(path);
  out << "status = " << m.status << '\n';
  if (!m.error.empty()) out << "error = " << m.error << '\n';
  out << "partial = " << (m.partial ? "true" : "false") << '\n';
  out << "steps = " << m.step_count << '\n';
  out << "snapshots = " << m.snapshot_count << '\n';
  out << "wall_time = " << format_number(m.wall_time) << '\n';
  out << "min_jacobian = " << format_number(m.min_jacobian) << '\n';
  out << "all_jacobians_positive = " << (m.min_jacobian > 0.0 ? "true" : "false") << '\n';
  std::istringstream cfg(m.config_echo);
  std::string line;
  while (std::getline(cfg, line))
    if (!line.empty()) out << "config." << line << '\n';
  for (const auto& [name, crc] : m.files) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", crc);
    out << "file." << name << " = " << buf << '\n';
  }
}

std::vector<std::pair<std::string, std::string>> read_key_values(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    kv.emplace_back(line.substr(0, eq), line.substr(eq + 3));
  }
  return kv;
}

}  // namespace morphoflow
