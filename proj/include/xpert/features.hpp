#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xpert/dataset.hpp"
#include "xpert/model.hpp"
#include "xpert/ppd.hpp"

namespace xpert {

struct FeatureParams {
  int resolution = 50;
  double diffusion_time = kDefaultDiffusionTime;
  int max_homology_dim = 1;  // orbit task
  EssentialPolicy essential = EssentialPolicy::reduced;
  std::uint64_t jitter_seed = 0;
};

void to_json(nlohmann::json& j, const FeatureParams& p);
void from_json(const nlohmann::json& j, FeatureParams& p);

/// Graph samples fill `extended`; orbit samples fill `per_dim` (dimensions
/// 0..max_homology_dim).
struct SampleFeatures {
  Task task = Task::graph;
  ExtendedPpd extended;
  std::vector<Ppd> per_dim;

  friend bool operator==(const SampleFeatures&, const SampleFeatures&) = default;
};

void to_json(nlohmann::json& j, const SampleFeatures& f);
void from_json(const nlohmann::json& j, SampleFeatures& f);

/// HKS -> extended persistence -> 4-channel PPD.
SampleFeatures graph_features(const Graph& g, const FeatureParams& p);
/// Weak alpha filtration -> diagrams of dims 0..max -> one PPD each.
SampleFeatures orbit_features(const PointCloud2D& pc, const FeatureParams& p);

ModelInput to_model_input(const SampleFeatures& f, int patch_size);

/// Hex SHA-256 over a canonical byte serialization of the input and every
/// parameter that affects the result.
std::string feature_key(const Graph& g, const FeatureParams& p);
std::string feature_key(const PointCloud2D& pc, const FeatureParams& p);
std::string sha256_hex(const std::string& bytes);

struct CacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t corrupt = 0;
};

/// One JSON file per key under `dir`. An empty dir disables caching.
class FeatureCache {
 public:
  explicit FeatureCache(std::string dir = {});

  bool enabled() const { return !dir_.empty(); }
  const std::string& dir() const { return dir_; }
  /// A missing entry is a miss; an unreadable or mismatched one counts as a
  /// miss and a corruption, with a warning on stderr.
  std::optional<SampleFeatures> load(const std::string& key, CacheStats& stats) const;
  void store(const std::string& key, const SampleFeatures& f) const;
  std::string path_for(const std::string& key) const;

 private:
  std::string dir_;
};

struct FeatureBuild {
  std::vector<SampleFeatures> features;
  CacheStats cache;
  std::size_t computed = 0;
};

/// Cache lookups and writes run on the calling thread; misses are computed
/// in parallel under Exec::parallel. Output order follows the input.
FeatureBuild build_features(const std::vector<GraphSample>& samples, const FeatureParams& p,
                            const FeatureCache& cache,
                            kernels::Exec exec = kernels::Exec::parallel);
FeatureBuild build_features(const std::vector<OrbitSample>& samples, const FeatureParams& p,
                            const FeatureCache& cache,
                            kernels::Exec exec = kernels::Exec::parallel);

}  // namespace xpert
