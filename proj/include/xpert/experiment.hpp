#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xpert/features.hpp"
#include "xpert/model.hpp"

namespace xpert {

struct TrainOptions {
  int epochs = 300;
  std::size_t batch_size = 64;
  double lr = 1e-4;
  double weight_decay = 5e-2;
  int warmup_epochs = 50;
};

void to_json(nlohmann::json& j, const TrainOptions& t);
void from_json(const nlohmann::json& j, TrainOptions& t);

struct ExperimentConfig {
  Task task = Task::orbit;
  std::string dataset;  // manifest path
  ModelConfig model;
  FeatureParams features;
  TrainOptions training;
  int folds = 10;
  std::vector<std::uint64_t> seeds{0};
  double test_fraction = 0.3;
  std::string cache_dir;

  /// Throws std::invalid_argument.
  void validate(bool cross_validation) const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

/// Desk-scale defaults: depth 2, D = 64, heads 4, 100 epochs. `paper_scale`
/// switches to depth 5, D = 192, heads 8, 300 epochs, 50 warmup epochs.
ExperimentConfig default_experiment(Task task, bool paper_scale = false);

struct Dataset {
  Task task = Task::orbit;
  std::vector<SampleFeatures> features;
  std::vector<int> labels;
  CacheStats cache;
  std::size_t computed = 0;
};

/// Ingests the manifest named by the config and builds (cached) features.
Dataset load_dataset(const ExperimentConfig& config,
                     kernels::Exec exec = kernels::Exec::parallel);

/// Deterministic stratified k-fold split: returns the eval indices of each
/// fold. Throws std::invalid_argument if a class has fewer samples than
/// folds.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, int folds,
                                                       std::uint64_t seed);

/// Per-class shuffled split; round(test_fraction * class size) samples of
/// each class go to the test side. Returns (train, test), each sorted.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const int> labels, double test_fraction, std::uint64_t seed);

using EpochCallback = std::function<void(int epoch, double mean_loss)>;

/// Mini-batch AdamW with linear warmup and cosine decay per step. Batches
/// are reshuffled every epoch from `seed`.
ModelParameters train_model(std::span<const ModelInput> inputs, std::span<const int> labels,
                            const ModelConfig& config, const TrainOptions& options,
                            std::uint64_t seed, kernels::Exec exec = kernels::Exec::parallel,
                            const EpochCallback& on_epoch = {});

double accuracy(const ModelParameters& params, std::span<const ModelInput> inputs,
                std::span<const int> labels, kernels::Exec exec = kernels::Exec::parallel);

struct TokenGroupStats {
  std::string group;
  double mean = 0.0;
  std::size_t min = 0;
  std::size_t max = 0;

  friend bool operator==(const TokenGroupStats&, const TokenGroupStats&) = default;
};

struct TokenStats {
  std::size_t samples = 0;
  std::vector<TokenGroupStats> groups;

  friend bool operator==(const TokenStats&, const TokenStats&) = default;
};

/// Non-zero patch counts per sample: "dim0", "dim1", ... for per-dimension
/// features, a single "extended" group for 4-channel PPDs.
TokenStats benchmark_tokens(std::span<const SampleFeatures> features, int patch_size);

struct RunResult {
  std::uint64_t seed = 0;
  int fold = -1;  // -1 for a train/test split
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double accuracy = 0.0;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

inline constexpr const char* kMetricsSchema = "xpert-metrics/1";

struct MetricsReport {
  std::string schema = kMetricsSchema;
  std::string task;
  std::string mode;  // "cross-validate" or "train"
  std::vector<RunResult> runs;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation over runs
  TokenStats tokens;
  std::optional<double> wall_clock_seconds;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

void to_json(nlohmann::json& j, const TokenStats& t);
void from_json(const nlohmann::json& j, TokenStats& t);
void to_json(nlohmann::json& j, const MetricsReport& r);
void from_json(const nlohmann::json& j, MetricsReport& r);

/// Fills mean and std from runs.
void summarize(MetricsReport& report);

/// k-fold cross-validation for every seed.
MetricsReport run_cv(const ExperimentConfig& config, const Dataset& data,
                     kernels::Exec exec = kernels::Exec::parallel);

/// One stratified train/test split per seed. When `keep_first` is set it
/// receives the model trained with the first seed.
MetricsReport run_split(const ExperimentConfig& config, const Dataset& data,
                        kernels::Exec exec = kernels::Exec::parallel,
                        ModelParameters* keep_first = nullptr);

}  // namespace xpert
