#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xpert/graph.hpp"
#include "xpert/pointcloud.hpp"

namespace xpert {

enum class Task { graph, orbit };

std::string to_string(Task t);
Task parse_task(const std::string& s);

struct GraphSample {
  std::string name;
  Graph graph;
  int label = 0;
};

/// Manifest: {"graphs": [{"file": "g0.txt", "label": 0}, ...]}. Relative
/// file paths resolve against the manifest's directory. Every failure names
/// the offending entry.
std::vector<GraphSample> ingest_graph_dataset(const std::string& manifest_path);

/// Labels must be exactly {0, ..., k-1}. Throws std::invalid_argument listing
/// the missing labels otherwise.
void check_label_contiguity(std::span<const int> labels);

inline constexpr std::array<double, 5> kOrbitParameters{2.5, 3.5, 4.0, 4.1, 4.3};

struct OrbitSample {
  std::string name;
  PointCloud2D cloud;
  int label = 0;
  double r = 0.0;
};

struct OrbitOptions {
  std::vector<double> r_values{kOrbitParameters.begin(), kOrbitParameters.end()};
  std::size_t per_class = 200;
  std::size_t points = 300;
  std::uint64_t seed = 0;
};

/// Sample i has label i % |r_values| and a starting point drawn from a
/// generator seeded with splitmix64(seed + i), so any sample can be
/// regenerated alone.
std::vector<OrbitSample> generate_orbit_dataset(const OrbitOptions& options);
OrbitSample generate_orbit_sample(const OrbitOptions& options, std::size_t index);

/// Binary cloud file: u64 point count, then (x, y) as little-endian f64.
void write_cloud(const std::string& path, const PointCloud2D& cloud);
PointCloud2D read_cloud(const std::string& path);

/// Writes one .bin per sample plus manifest.json into `dir`:
///   {"r_values": [...], "samples_per_class", "points_per_orbit", "seed",
///    "samples": [{"file", "label", "r"}, ...]}
/// Returns the manifest path.
std::string write_orbit_dataset(const std::string& dir, const OrbitOptions& options,
                                const std::vector<OrbitSample>& samples);
/// Reads the clouds listed under "samples", or regenerates them from the
/// header fields when the list is absent.
std::vector<OrbitSample> read_orbit_dataset(const std::string& manifest_path);

}  // namespace xpert
