#include "xpert/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <type_traits>

#include "xpert/optim.hpp"
#include "xpert/random.hpp"

namespace xpert {

void to_json(nlohmann::json& j, const TrainOptions& t) {
  j = nlohmann::json{{"epochs", t.epochs},
                     {"batch_size", t.batch_size},
                     {"lr", t.lr},
                     {"weight_decay", t.weight_decay},
                     {"warmup_epochs", t.warmup_epochs}};
}

void from_json(const nlohmann::json& j, TrainOptions& t) {
  TrainOptions d;
  t.epochs = j.value("epochs", d.epochs);
  t.batch_size = j.value("batch_size", d.batch_size);
  t.lr = j.value("lr", d.lr);
  t.weight_decay = j.value("weight_decay", d.weight_decay);
  t.warmup_epochs = j.value("warmup_epochs", d.warmup_epochs);
}

void ExperimentConfig::validate(bool cross_validation) const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("experiment config: " + what); };
  model.validate();
  if (dataset.empty()) fail("dataset manifest path is required");
  if (seeds.empty()) fail("seeds must be non-empty");
  if (cross_validation && folds < 2) fail("folds must be at least 2");
  if (!cross_validation && !(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail("test_fraction must lie in (0, 1)");
  }
  if (model.resolution != features.resolution) fail("model and feature resolution differ");
  const InputMode expected = task == Task::graph ? InputMode::extended : InputMode::ordinary;
  if (model.input_mode != expected) fail("graph task needs extended input, orbit task ordinary");
  if (task == Task::orbit && model.max_homology_dim != features.max_homology_dim) {
    fail("model and feature max_homology_dim differ");
  }
  if (training.epochs < 1 || training.batch_size < 1) fail("epochs and batch_size must be positive");
  if (training.warmup_epochs < 0 || training.warmup_epochs > training.epochs) {
    fail("warmup_epochs must lie in [0, epochs]");
  }
  if (!(training.lr > 0.0) || training.weight_decay < 0.0) fail("lr must be positive, weight_decay non-negative");
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"task", to_string(c.task)},   {"dataset", c.dataset},
                     {"model", c.model},            {"features", c.features},
                     {"training", c.training},      {"folds", c.folds},
                     {"seeds", c.seeds},            {"test_fraction", c.test_fraction},
                     {"cache_dir", c.cache_dir}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  c = default_experiment(parse_task(j.value("task", std::string("orbit"))));
  c.dataset = j.value("dataset", c.dataset);
  // Partial sections patch the task defaults.
  auto merge = [&](const char* key, auto& section) {
    if (!j.contains(key)) return;
    nlohmann::json base = section;
    base.update(j[key]);
    section = base.get<std::decay_t<decltype(section)>>();
  };
  merge("model", c.model);
  merge("features", c.features);
  merge("training", c.training);
  c.folds = j.value("folds", c.folds);
  c.seeds = j.value("seeds", c.seeds);
  c.test_fraction = j.value("test_fraction", c.test_fraction);
  c.cache_dir = j.value("cache_dir", c.cache_dir);
}

ExperimentConfig default_experiment(Task task, bool paper_scale) {
  ExperimentConfig c;
  c.task = task;
  c.model.input_mode = task == Task::graph ? InputMode::extended : InputMode::ordinary;
  c.model.num_classes = task == Task::graph ? 2 : static_cast<int>(kOrbitParameters.size());
  c.training.lr = task == Task::graph ? 1e-3 : 1e-4;
  if (paper_scale) {
    c.model.depth = 5;
    c.model.heads = 8;
    c.model.dim = 192;
    c.training.epochs = 300;
    c.training.warmup_epochs = 50;
  } else {
    c.model.depth = 2;
    c.model.heads = 4;
    c.model.dim = 64;
    c.training.epochs = 100;
    c.training.warmup_epochs = 10;
    if (task == Task::orbit) c.training.lr = 5e-4;
  }
  return c;
}

Dataset load_dataset(const ExperimentConfig& config, kernels::Exec exec) {
  Dataset data;
  data.task = config.task;
  const FeatureCache cache(config.cache_dir);
  FeatureBuild built;
  if (config.task == Task::graph) {
    const auto samples = ingest_graph_dataset(config.dataset);
    built = build_features(samples, config.features, cache, exec);
    for (const auto& s : samples) data.labels.push_back(s.label);
  } else {
    const auto samples = read_orbit_dataset(config.dataset);
    built = build_features(samples, config.features, cache, exec);
    for (const auto& s : samples) data.labels.push_back(s.label);
  }
  data.features = std::move(built.features);
  data.cache = built.cache;
  data.computed = built.computed;
  return data;
}

namespace {

std::map<int, std::vector<std::size_t>> by_class(std::span<const int> labels) {
  std::map<int, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
  return out;
}

}  // namespace

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, int folds,
                                                       std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("stratified_folds: need at least 2 folds");
  auto classes = by_class(labels);
  for (const auto& [label, members] : classes) {
    if (members.size() < static_cast<std::size_t>(folds)) {
      throw std::invalid_argument("class " + std::to_string(label) + " has " +
                                  std::to_string(members.size()) + " samples, fewer than " +
                                  std::to_string(folds) + " folds");
    }
  }
  std::mt19937_64 rng(splitmix64(seed));
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
  std::size_t next = 0;  // dealing continues across classes to balance fold sizes
  for (auto& [label, members] : classes) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i : members) {
      out[next].push_back(i);
      next = (next + 1) % out.size();
    }
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const int> labels, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("stratified_split: test_fraction must lie in (0, 1)");
  }
  std::mt19937_64 rng(splitmix64(seed));
  std::vector<std::size_t> train, test;
  for (auto& [label, members] : by_class(labels)) {
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::lround(test_fraction * members.size()));
    test.insert(test.end(), members.begin(), members.begin() + n_test);
    train.insert(train.end(), members.begin() + n_test, members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

ModelParameters train_model(std::span<const ModelInput> inputs, std::span<const int> labels,
                            const ModelConfig& config, const TrainOptions& options,
                            std::uint64_t seed, kernels::Exec exec, const EpochCallback& on_epoch) {
  if (inputs.size() != labels.size()) throw std::invalid_argument("train: input/label size mismatch");
  if (inputs.empty()) throw std::invalid_argument("train: empty training set");
  auto params = ModelParameters::initialize(config, splitmix64(seed));
  AdamWState state(params.values.size());
  const std::size_t n = inputs.size();
  const std::size_t per_epoch = (n + options.batch_size - 1) / options.batch_size;
  const std::size_t total = per_epoch * static_cast<std::size_t>(options.epochs);
  const std::size_t warmup = per_epoch * static_cast<std::size_t>(options.warmup_epochs);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(splitmix64(seed ^ 0x9e3779b97f4a7c15ULL));
  std::vector<ModelInput> batch;
  std::vector<int> batch_labels;
  std::size_t step = 0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += options.batch_size) {
      const std::size_t end = std::min(n, start + options.batch_size);
      batch.clear();
      batch_labels.clear();
      for (std::size_t k = start; k < end; ++k) {
        batch.push_back(inputs[order[k]]);
        batch_labels.push_back(labels[order[k]]);
      }
      const auto result = loss_and_gradients(batch, batch_labels, params, exec);
      loss_sum += result.loss * static_cast<double>(end - start);
      AdamWOptions opt;
      opt.lr = lr_schedule(step, total, warmup, options.lr);
      opt.weight_decay = options.weight_decay;
      adamw_step(params.values, result.grads, state, opt);
      ++step;
    }
    if (on_epoch) on_epoch(epoch, loss_sum / static_cast<double>(n));
  }
  return params;
}

double accuracy(const ModelParameters& params, std::span<const ModelInput> inputs,
                std::span<const int> labels, kernels::Exec exec) {
  if (inputs.size() != labels.size()) throw std::invalid_argument("accuracy: input/label size mismatch");
  if (inputs.empty()) return 0.0;
  std::vector<int> correct(inputs.size(), 0);
  const auto n = static_cast<std::ptrdiff_t>(inputs.size());
  auto one = [&](std::size_t i) {
    const auto p = predict_proba(inputs[i], params, exec);
    const auto best = std::max_element(p.begin(), p.end()) - p.begin();
    correct[i] = best == labels[i] ? 1 : 0;
  };
  if (exec == kernels::Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < inputs.size(); ++i) one(i);
  }
  return static_cast<double>(std::accumulate(correct.begin(), correct.end(), 0)) /
         static_cast<double>(inputs.size());
}

TokenStats benchmark_tokens(std::span<const SampleFeatures> features, int patch_size) {
  TokenStats stats;
  stats.samples = features.size();
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::string> names;
  for (const auto& f : features) {
    std::vector<std::size_t> per_group;
    if (f.task == Task::graph) {
      per_group.push_back(patchify(f.extended, patch_size).patches.size());
      if (names.empty()) names = {"extended"};
    } else {
      for (const auto& ppd : f.per_dim) {
        per_group.push_back(patchify(std::span<const Ppd>(&ppd, 1), patch_size).patches.size());
      }
      for (std::size_t d = names.size(); d < f.per_dim.size(); ++d) names.push_back("dim" + std::to_string(d));
    }
    if (counts.size() < per_group.size()) counts.resize(per_group.size());
    for (std::size_t g = 0; g < per_group.size(); ++g) counts[g].push_back(per_group[g]);
  }
  for (std::size_t g = 0; g < counts.size(); ++g) {
    TokenGroupStats s;
    s.group = names[g];
    const auto& c = counts[g];
    s.mean = static_cast<double>(std::accumulate(c.begin(), c.end(), std::size_t{0})) /
             static_cast<double>(c.size());
    s.min = *std::min_element(c.begin(), c.end());
    s.max = *std::max_element(c.begin(), c.end());
    stats.groups.push_back(s);
  }
  return stats;
}

void to_json(nlohmann::json& j, const TokenStats& t) {
  j = nlohmann::json{{"samples", t.samples}, {"groups", nlohmann::json::array()}};
  for (const auto& g : t.groups) {
    j["groups"].push_back({{"group", g.group}, {"mean", g.mean}, {"min", g.min}, {"max", g.max}});
  }
}

void from_json(const nlohmann::json& j, TokenStats& t) {
  t = TokenStats{};
  t.samples = j.at("samples").get<std::size_t>();
  for (const auto& g : j.at("groups")) {
    t.groups.push_back({g.at("group").get<std::string>(), g.at("mean").get<double>(),
                        g.at("min").get<std::size_t>(), g.at("max").get<std::size_t>()});
  }
}

void to_json(nlohmann::json& j, const MetricsReport& r) {
  j = nlohmann::json{{"schema", r.schema}, {"task", r.task}, {"mode", r.mode},
                     {"runs", nlohmann::json::array()}, {"mean", r.mean}, {"std", r.std},
                     {"tokens", r.tokens}};
  for (const auto& run : r.runs) {
    j["runs"].push_back({{"seed", run.seed},
                         {"fold", run.fold},
                         {"train_size", run.train_size},
                         {"test_size", run.test_size},
                         {"accuracy", run.accuracy}});
  }
  if (r.wall_clock_seconds) j["wall_clock_seconds"] = *r.wall_clock_seconds;
}

void from_json(const nlohmann::json& j, MetricsReport& r) {
  r = MetricsReport{};
  r.schema = j.at("schema").get<std::string>();
  if (r.schema != kMetricsSchema) throw std::invalid_argument("unsupported metrics schema " + r.schema);
  r.task = j.at("task").get<std::string>();
  r.mode = j.at("mode").get<std::string>();
  for (const auto& run : j.at("runs")) {
    r.runs.push_back({run.at("seed").get<std::uint64_t>(), run.at("fold").get<int>(),
                      run.at("train_size").get<std::size_t>(),
                      run.at("test_size").get<std::size_t>(), run.at("accuracy").get<double>()});
  }
  r.mean = j.at("mean").get<double>();
  r.std = j.at("std").get<double>();
  r.tokens = j.at("tokens").get<TokenStats>();
  if (j.contains("wall_clock_seconds")) r.wall_clock_seconds = j["wall_clock_seconds"].get<double>();
}

void summarize(MetricsReport& report) {
  report.mean = 0.0;
  report.std = 0.0;
  if (report.runs.empty()) return;
  const double n = static_cast<double>(report.runs.size());
  for (const auto& r : report.runs) report.mean += r.accuracy;
  report.mean /= n;
  for (const auto& r : report.runs) report.std += (r.accuracy - report.mean) * (r.accuracy - report.mean);
  report.std = std::sqrt(report.std / n);
}

namespace {

struct Prepared {
  ModelConfig model;
  std::vector<ModelInput> inputs;
};

Prepared prepare(const ExperimentConfig& config, const Dataset& data) {
  if (data.features.size() != data.labels.size() || data.features.empty()) {
    throw std::invalid_argument("dataset is empty or inconsistent");
  }
  check_label_contiguity(data.labels);
  Prepared p;
  p.model = config.model;
  const int classes = *std::max_element(data.labels.begin(), data.labels.end()) + 1;
  if (classes > p.model.num_classes) {
    throw std::invalid_argument("dataset has " + std::to_string(classes) +
                                " classes but the model config allows " +
                                std::to_string(p.model.num_classes));
  }
  p.inputs.reserve(data.features.size());
  for (const auto& f : data.features) p.inputs.push_back(to_model_input(f, p.model.patch_size));
  return p;
}

template <class T>
std::vector<T> gather(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

MetricsReport new_report(const ExperimentConfig& config, const Dataset& data, const char* mode) {
  MetricsReport r;
  r.task = to_string(config.task);
  r.mode = mode;
  r.tokens = benchmark_tokens(data.features, config.model.patch_size);
  return r;
}

}  // namespace

MetricsReport run_cv(const ExperimentConfig& config, const Dataset& data, kernels::Exec exec) {
  config.validate(true);
  const auto prep = prepare(config, data);
  auto report = new_report(config, data, "cross-validate");
  for (const auto seed : config.seeds) {
    const auto folds = stratified_folds(data.labels, config.folds, seed);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<char> in_test(data.labels.size(), 0);
      for (std::size_t i : folds[f]) in_test[i] = 1;
      std::vector<std::size_t> train;
      for (std::size_t i = 0; i < in_test.size(); ++i) {
        if (!in_test[i]) train.push_back(i);
      }
      const auto params = train_model(gather(prep.inputs, train), gather(data.labels, train),
                                       prep.model, config.training, splitmix64(seed) + f, exec);
      RunResult run;
      run.seed = seed;
      run.fold = static_cast<int>(f);
      run.train_size = train.size();
      run.test_size = folds[f].size();
      run.accuracy = accuracy(params, gather(prep.inputs, folds[f]), gather(data.labels, folds[f]), exec);
      report.runs.push_back(run);
    }
  }
  summarize(report);
  return report;
}

MetricsReport run_split(const ExperimentConfig& config, const Dataset& data, kernels::Exec exec,
                        ModelParameters* keep_first) {
  config.validate(false);
  const auto prep = prepare(config, data);
  auto report = new_report(config, data, "train");
  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    const auto seed = config.seeds[s];
    const auto [train, test] = stratified_split(data.labels, config.test_fraction, seed);
    auto params = train_model(gather(prep.inputs, train), gather(data.labels, train), prep.model,
                              config.training, splitmix64(seed), exec);
    RunResult run;
    run.seed = seed;
    run.train_size = train.size();
    run.test_size = test.size();
    run.accuracy = accuracy(params, gather(prep.inputs, test), gather(data.labels, test), exec);
    report.runs.push_back(run);
    if (s == 0 && keep_first) *keep_first = std::move(params);
  }
  summarize(report);
  return report;
}

}  // namespace xpert
