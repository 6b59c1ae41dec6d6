#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "morphoflow/coupling.hpp"
#include "morphoflow/gridsearch.hpp"

namespace morphoflow {

/// `node,x,y,tau,p` with x, y the deformed positions and p = τ/J.
void write_snapshot_csv(const std::filesystem::path& path, const Snapshot& snap);

struct SnapshotRow {
  std::size_t node;
  double x, y, tau, p;
};
std::vector<SnapshotRow> read_snapshot_csv(const std::filesystem::path& path);

/// One `x y` pair per line, in boundary order.
void write_polyline(const std::filesystem::path& path, const Points& pts);
Points read_polyline(const std::filesystem::path& path);

/// `cx,cy,distance`; failed rows carry `nan`.
void write_landscape_csv(const std::filesystem::path& path, const std::vector<GridRow>& rows);

std::uint32_t file_crc32(const std::filesystem::path& path);

/// Plain `key = value` record of a run.
struct RunManifest {
  std::string status = "ok";
  std::string error;
  bool partial = false;
  std::size_t step_count = 0;
  std::size_t snapshot_count = 0;
  double wall_time = 0.0;
  double min_jacobian = 1.0;
  std::string config_echo;                                    // write_config output
  std::vector<std::pair<std::string, std::uint32_t>> files;   // name relative to the run directory, crc32
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

/// key → value lines of a manifest (or any key = value file), in file order.
std::vector<std::pair<std::string, std::string>> read_key_values(const std::filesystem::path& path);

std::string format_number(double v);

}  // namespace morphoflow
