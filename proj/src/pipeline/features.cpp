#include "xpert/features.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "xpert/diagram_io.hpp"
#include "xpert/ppd_io.hpp"

namespace fs = std::filesystem;

namespace xpert {

namespace {

constexpr const char* kFeatureFormat = "xpert-features/1";

std::string policy_name(EssentialPolicy p) { return p == EssentialPolicy::cap ? "cap" : "reduced"; }

EssentialPolicy parse_policy(const std::string& s) {
  if (s == "cap") return EssentialPolicy::cap;
  if (s == "reduced") return EssentialPolicy::reduced;
  throw std::invalid_argument("unknown essential policy \"" + s + "\"");
}

// Exact, locale-independent text for a double.
std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string params_block(const FeatureParams& p) {
  std::ostringstream os;
  os << kFeatureFormat << "\nH " << p.resolution << "\nt " << hexfloat(p.diffusion_time)
     << "\nmaxdim " << p.max_homology_dim << "\nessential " << policy_name(p.essential)
     << "\njitter " << p.jitter_seed << "\n";
  return os.str();
}

}  // namespace

void to_json(nlohmann::json& j, const FeatureParams& p) {
  j = nlohmann::json{{"resolution", p.resolution},
                     {"diffusion_time", p.diffusion_time},
                     {"max_homology_dim", p.max_homology_dim},
                     {"essential", policy_name(p.essential)},
                     {"jitter_seed", p.jitter_seed}};
}

void from_json(const nlohmann::json& j, FeatureParams& p) {
  FeatureParams d;
  p.resolution = j.value("resolution", d.resolution);
  p.diffusion_time = j.value("diffusion_time", d.diffusion_time);
  p.max_homology_dim = j.value("max_homology_dim", d.max_homology_dim);
  p.essential = parse_policy(j.value("essential", policy_name(d.essential)));
  p.jitter_seed = j.value("jitter_seed", d.jitter_seed);
}

void to_json(nlohmann::json& j, const SampleFeatures& f) {
  j = nlohmann::json{{"task", to_string(f.task)}};
  if (f.task == Task::graph) {
    j["extended"] = f.extended;
  } else {
    j["per_dim"] = f.per_dim;
  }
}

void from_json(const nlohmann::json& j, SampleFeatures& f) {
  f = SampleFeatures{};
  f.task = parse_task(j.at("task").get<std::string>());
  if (f.task == Task::graph) {
    f.extended = j.at("extended").get<ExtendedPpd>();
  } else {
    f.per_dim = j.at("per_dim").get<std::vector<Ppd>>();
  }
}

SampleFeatures graph_features(const Graph& g, const FeatureParams& p) {
  SampleFeatures f;
  f.task = Task::graph;
  f.extended = pixelize_extended(extended_persistence(g, hks(g, p.diffusion_time)), p.resolution);
  return f;
}

SampleFeatures orbit_features(const PointCloud2D& pc, const FeatureParams& p) {
  SampleFeatures f;
  f.task = Task::orbit;
  const auto diagrams =
      persistence(weak_alpha_filtration(pc, p.jitter_seed), p.max_homology_dim, p.essential);
  for (const auto& d : diagrams) f.per_dim.push_back(pixelize(d, p.resolution));
  return f;
}

ModelInput to_model_input(const SampleFeatures& f, int patch_size) {
  if (f.task == Task::graph) return make_extended_input(f.extended, patch_size);
  return make_ordinary_input(f.per_dim, patch_size);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string feature_key(const Graph& g, const FeatureParams& p) {
  std::ostringstream os;
  os << params_block(p) << "graph " << g.num_vertices() << " " << g.edges().size() << "\n";
  for (const auto& [a, b] : g.edges()) os << a << " " << b << "\n";
  return sha256_hex(os.str());
}

std::string feature_key(const PointCloud2D& pc, const FeatureParams& p) {
  std::ostringstream os;
  os << params_block(p) << "cloud " << pc.size() << "\n";
  for (const auto& q : pc.points) os << hexfloat(q.x) << " " << hexfloat(q.y) << "\n";
  return sha256_hex(os.str());
}

FeatureCache::FeatureCache(std::string dir) : dir_(std::move(dir)) {
  if (enabled()) fs::create_directories(dir_);
}

std::string FeatureCache::path_for(const std::string& key) const {
  return (fs::path(dir_) / (key + ".json")).string();
}

std::optional<SampleFeatures> FeatureCache::load(const std::string& key, CacheStats& stats) const {
  if (!enabled()) {
    ++stats.misses;
    return std::nullopt;
  }
  const auto path = path_for(key);
  if (!fs::exists(path)) {
    ++stats.misses;
    return std::nullopt;
  }
  try {
    std::ifstream in(path);
    const auto j = nlohmann::json::parse(in);
    if (j.at("key").get<std::string>() != key) throw std::runtime_error("key mismatch");
    auto f = j.at("features").get<SampleFeatures>();
    ++stats.hits;
    return f;
  } catch (const std::exception& e) {
    std::cerr << "warning: cache entry " << path << " is corrupt (" << e.what()
              << "); recomputing\n";
    ++stats.misses;
    ++stats.corrupt;
    return std::nullopt;
  }
}

void FeatureCache::store(const std::string& key, const SampleFeatures& f) const {
  if (!enabled()) return;
  const auto path = path_for(key);
  const auto tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp);
    out << nlohmann::json{{"key", key}, {"features", f}}.dump();
  }
  fs::rename(tmp, path);
}

namespace {

template <class Sample, class Compute>
FeatureBuild build(const std::vector<Sample>& samples, const FeatureParams& p,
                   const FeatureCache& cache, kernels::Exec exec, Compute compute) {
  FeatureBuild out;
  out.features.resize(samples.size());
  std::vector<std::string> keys(samples.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    keys[i] = cache.enabled() ? compute.key(samples[i], p) : std::string{};
    if (auto hit = cache.load(keys[i], out.cache)) {
      out.features[i] = std::move(*hit);
    } else {
      todo.push_back(i);
    }
  }
  const auto n = static_cast<std::ptrdiff_t>(todo.size());
  if (exec == kernels::Exec::parallel) {
    std::vector<std::exception_ptr> errors(todo.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const std::size_t i = todo[static_cast<std::size_t>(k)];
      try {
        out.features[i] = compute(samples[i], p);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::size_t i : todo) out.features[i] = compute(samples[i], p);
  }
  for (std::size_t i : todo) cache.store(keys[i], out.features[i]);
  out.computed = todo.size();
  return out;
}

struct GraphCompute {
  SampleFeatures operator()(const GraphSample& s, const FeatureParams& p) const {
    return graph_features(s.graph, p);
  }
  std::string key(const GraphSample& s, const FeatureParams& p) const {
    return feature_key(s.graph, p);
  }
};

struct OrbitCompute {
  SampleFeatures operator()(const OrbitSample& s, const FeatureParams& p) const {
    return orbit_features(s.cloud, p);
  }
  std::string key(const OrbitSample& s, const FeatureParams& p) const {
    return feature_key(s.cloud, p);
  }
};

}  // namespace

FeatureBuild build_features(const std::vector<GraphSample>& samples, const FeatureParams& p,
                            const FeatureCache& cache, kernels::Exec exec) {
  return build(samples, p, cache, exec, GraphCompute{});
}

FeatureBuild build_features(const std::vector<OrbitSample>& samples, const FeatureParams& p,
                            const FeatureCache& cache, kernels::Exec exec) {
  return build(samples, p, cache, exec, OrbitCompute{});
}

}  // namespace xpert
