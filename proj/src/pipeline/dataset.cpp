#include "xpert/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "xpert/diagram_io.hpp"
#include "xpert/random.hpp"

namespace fs = std::filesystem;

namespace xpert {

static_assert(std::endian::native == std::endian::little, "cloud I/O assumes little-endian");

std::string to_string(Task t) { return t == Task::graph ? "graph" : "orbit"; }

Task parse_task(const std::string& s) {
  if (s == "graph") return Task::graph;
  if (s == "orbit") return Task::orbit;
  throw std::invalid_argument("unknown task \"" + s + "\" (expected graph or orbit)");
}

namespace {

std::string resolve(const fs::path& base, const std::string& file) {
  const fs::path p(file);
  return (p.is_absolute() ? p : base / p).string();
}

}  // namespace

void check_label_contiguity(std::span<const int> labels) {
  if (labels.empty()) return;
  std::set<int> seen(labels.begin(), labels.end());
  if (*seen.begin() < 0) {
    throw std::invalid_argument("labels must be non-negative, found " + std::to_string(*seen.begin()));
  }
  std::string missing;
  for (int k = 0; k <= *seen.rbegin(); ++k) {
    if (!seen.count(k)) missing += (missing.empty() ? "" : ", ") + std::to_string(k);
  }
  if (!missing.empty()) {
    throw std::invalid_argument("labels are not contiguous from 0: missing " + missing);
  }
}

std::vector<GraphSample> ingest_graph_dataset(const std::string& manifest_path) {
  const auto manifest = read_json_file(manifest_path);
  if (!manifest.contains("graphs") || !manifest["graphs"].is_array()) {
    throw std::invalid_argument(manifest_path + ": expected a \"graphs\" array");
  }
  const fs::path base = fs::path(manifest_path).parent_path();
  std::vector<GraphSample> out;
  std::vector<int> labels;
  std::size_t i = 0;
  for (const auto& entry : manifest["graphs"]) {
    const std::string where = manifest_path + ": graphs[" + std::to_string(i++) + "]";
    if (!entry.is_object() || !entry.contains("file") || !entry.contains("label")) {
      throw std::invalid_argument(where + " needs \"file\" and \"label\"");
    }
    GraphSample s;
    s.name = entry["file"].get<std::string>();
    s.label = entry["label"].get<int>();
    const auto path = resolve(base, s.name);
    if (!fs::exists(path)) throw std::invalid_argument(where + ": missing file " + path);
    try {
      s.graph = read_graph(path);
    } catch (const std::exception& e) {
      throw std::invalid_argument(where + ": " + e.what());
    }
    labels.push_back(s.label);
    out.push_back(std::move(s));
  }
  try {
    check_label_contiguity(labels);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(manifest_path + ": " + e.what());
  }
  return out;
}

OrbitSample generate_orbit_sample(const OrbitOptions& options, std::size_t index) {
  std::mt19937_64 rng(splitmix64(options.seed + index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  OrbitSample s;
  s.label = static_cast<int>(index % options.r_values.size());
  s.r = options.r_values[s.label];
  const double x0 = unit(rng);
  const double y0 = unit(rng);
  s.cloud = generate_orbit(s.r, x0, y0, options.points);
  char name[32];
  std::snprintf(name, sizeof name, "orbit_%05zu.bin", index);
  s.name = name;
  return s;
}

std::vector<OrbitSample> generate_orbit_dataset(const OrbitOptions& options) {
  if (options.r_values.empty() || options.per_class == 0 || options.points == 0) {
    throw std::invalid_argument("orbit dataset needs r values, samples per class and points");
  }
  for (double r : options.r_values) {
    if (!(r > 0.0)) throw std::invalid_argument("orbit parameter r must be positive");
  }
  std::vector<OrbitSample> out;
  const std::size_t n = options.per_class * options.r_values.size();
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(generate_orbit_sample(options, i));
  return out;
}

void write_cloud(const std::string& path, const PointCloud2D& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::uint64_t n = cloud.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (const auto& p : cloud.points) {
    out.write(reinterpret_cast<const char*>(&p.x), sizeof(double));
    out.write(reinterpret_cast<const char*>(&p.y), sizeof(double));
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

PointCloud2D read_cloud(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint64_t n = 0;
  if (!in.read(reinterpret_cast<char*>(&n), sizeof n)) {
    throw std::runtime_error(path + ": missing point count");
  }
  const auto size = fs::file_size(path);
  if (size != sizeof n + n * 2 * sizeof(double)) {
    throw std::runtime_error(path + ": header says " + std::to_string(n) +
                             " points but the file holds " + std::to_string(size) + " bytes");
  }
  PointCloud2D pc;
  pc.points.resize(n);
  for (auto& p : pc.points) {
    in.read(reinterpret_cast<char*>(&p.x), sizeof(double));
    in.read(reinterpret_cast<char*>(&p.y), sizeof(double));
  }
  if (!in) throw std::runtime_error(path + ": truncated");
  return pc;
}

std::string write_orbit_dataset(const std::string& dir, const OrbitOptions& options,
                                const std::vector<OrbitSample>& samples) {
  fs::create_directories(dir);
  nlohmann::json manifest{{"r_values", options.r_values},
                          {"samples_per_class", options.per_class},
                          {"points_per_orbit", options.points},
                          {"seed", options.seed},
                          {"samples", nlohmann::json::array()}};
  for (const auto& s : samples) {
    write_cloud((fs::path(dir) / s.name).string(), s.cloud);
    manifest["samples"].push_back({{"file", s.name}, {"label", s.label}, {"r", s.r}});
  }
  const auto path = (fs::path(dir) / "manifest.json").string();
  write_json_file(path, manifest);
  return path;
}

std::vector<OrbitSample> read_orbit_dataset(const std::string& manifest_path) {
  const auto manifest = read_json_file(manifest_path);
  if (!manifest.is_object()) throw std::invalid_argument(manifest_path + ": expected an object");
  if (!manifest.contains("samples")) {
    OrbitOptions opt;
    try {
      opt.r_values = manifest.at("r_values").get<std::vector<double>>();
      opt.per_class = manifest.at("samples_per_class").get<std::size_t>();
      opt.points = manifest.at("points_per_orbit").get<std::size_t>();
      opt.seed = manifest.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(manifest_path + ": " + e.what());
    }
    return generate_orbit_dataset(opt);
  }
  if (!manifest["samples"].is_array()) {
    throw std::invalid_argument(manifest_path + ": \"samples\" must be an array");
  }
  const fs::path base = fs::path(manifest_path).parent_path();
  std::vector<OrbitSample> out;
  std::vector<int> labels;
  std::size_t i = 0;
  for (const auto& entry : manifest["samples"]) {
    const std::string where = manifest_path + ": samples[" + std::to_string(i++) + "]";
    if (!entry.is_object() || !entry.contains("file") || !entry.contains("label")) {
      throw std::invalid_argument(where + " needs \"file\" and \"label\"");
    }
    OrbitSample s;
    s.name = entry["file"].get<std::string>();
    s.label = entry["label"].get<int>();
    s.r = entry.value("r", 0.0);
    const auto path = resolve(base, s.name);
    if (!fs::exists(path)) throw std::invalid_argument(where + ": missing file " + path);
    try {
      s.cloud = read_cloud(path);
    } catch (const std::exception& e) {
      throw std::invalid_argument(where + ": " + e.what());
    }
    labels.push_back(s.label);
    out.push_back(std::move(s));
  }
  try {
    check_label_contiguity(labels);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(manifest_path + ": " + e.what());
  }
  return out;
}

}  // namespace xpert
