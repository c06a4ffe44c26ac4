#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "support/tmpdir.hpp"
#include "xpert/diagram_io.hpp"
#include "xpert/experiment.hpp"
#include "xpert/stability.hpp"

using namespace xpert;
using xpert::testing::TempDir;

namespace {

std::string cycle_text(int n) {
  std::ostringstream s;
  s << n << " " << n << "\n";
  for (int i = 0; i < n; ++i) s << i << " " << (i + 1) % n << "\n";
  return s.str();
}

std::string path_text(int n) {
  std::ostringstream s;
  s << n << " " << n - 1 << "\n";
  for (int i = 0; i + 1 < n; ++i) s << i << " " << i + 1 << "\n";
  return s.str();
}

// Cycles (label 0) against paths (label 1).
std::string write_graph_dataset(const TempDir& dir, int per_class) {
  nlohmann::json manifest{{"graphs", nlohmann::json::array()}};
  for (int i = 0; i < per_class; ++i) {
    const int n = 4 + i;
    dir.write("c" + std::to_string(i) + ".txt", cycle_text(n));
    dir.write("p" + std::to_string(i) + ".txt", path_text(n));
    manifest["graphs"].push_back({{"file", "c" + std::to_string(i) + ".txt"}, {"label", 0}});
    manifest["graphs"].push_back({{"file", "p" + std::to_string(i) + ".txt"}, {"label", 1}});
  }
  return dir.write("manifest.json", manifest.dump());
}

ExperimentConfig tiny_graph_experiment(const std::string& manifest, const std::string& cache) {
  auto c = default_experiment(Task::graph);
  c.dataset = manifest;
  c.cache_dir = cache;
  c.model.depth = 1;
  c.model.dim = 16;
  c.model.heads = 2;
  c.training.epochs = 3;
  c.training.warmup_epochs = 1;
  c.training.batch_size = 4;
  c.folds = 4;
  c.seeds = {0, 1};
  return c;
}

template <class F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(GraphManifest, IngestsRelativePaths) {
  TempDir dir("manifest");
  const auto samples = ingest_graph_dataset(write_graph_dataset(dir, 2));
  ASSERT_EQ(samples.size(), 4u);
  EXPECT_EQ(samples[0].graph.num_vertices(), 4u);
  EXPECT_EQ(samples[1].label, 1);
}

TEST(GraphManifest, ErrorsNameTheEntry) {
  TempDir dir("manifest_err");
  dir.write("ok.txt", cycle_text(3));
  dir.write("bad.txt", "3 1\n0 3\n");
  nlohmann::json m{{"graphs", {{{"file", "ok.txt"}, {"label", 0}}, {{"file", "bad.txt"}, {"label", 1}}}}};
  const auto msg = error_of([&] { ingest_graph_dataset(dir.write("m.json", m.dump())); });
  EXPECT_NE(msg.find("graphs[1]"), std::string::npos) << msg;
  EXPECT_NE(msg.find("3"), std::string::npos) << msg;

  m["graphs"][1]["file"] = "absent.txt";
  EXPECT_NE(error_of([&] { ingest_graph_dataset(dir.write("m.json", m.dump())); }).find("absent.txt"),
            std::string::npos);
}

TEST(GraphManifest, LabelGapIsReported) {
  TempDir dir("manifest_gap");
  dir.write("a.txt", cycle_text(3));
  nlohmann::json m{{"graphs", {{{"file", "a.txt"}, {"label", 0}}, {{"file", "a.txt"}, {"label", 2}}}}};
  const auto msg = error_of([&] { ingest_graph_dataset(dir.write("m.json", m.dump())); });
  EXPECT_NE(msg.find("missing 1"), std::string::npos) << msg;
  EXPECT_THROW(check_label_contiguity(std::vector<int>{-1, 0}), std::invalid_argument);
  EXPECT_NO_THROW(check_label_contiguity(std::vector<int>{1, 0, 1}));
}

TEST(OrbitDataset, DeterministicAndBalanced) {
  OrbitOptions o;
  o.per_class = 3;
  o.points = 50;
  o.seed = 4;
  const auto a = generate_orbit_dataset(o);
  ASSERT_EQ(a.size(), 15u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].label, static_cast<int>(i % 5));
    EXPECT_EQ(a[i].cloud.size(), 50u);
    EXPECT_EQ(a[i].cloud.points, generate_orbit_sample(o, i).cloud.points);
    for (const auto& p : a[i].cloud.points) {
      EXPECT_GE(p.x, 0.0);
      EXPECT_LT(p.x, 1.0);
    }
  }
  o.seed = 5;
  EXPECT_NE(generate_orbit_dataset(o)[0].cloud.points, a[0].cloud.points);
}

TEST(OrbitDataset, ManifestRoundTripAndRegeneration) {
  TempDir dir("orbit");
  OrbitOptions o;
  o.r_values = {2.5, 4.3};
  o.per_class = 2;
  o.points = 20;
  const auto samples = generate_orbit_dataset(o);
  const auto manifest = write_orbit_dataset(dir.path(), o, samples);
  const auto back = read_orbit_dataset(manifest);
  ASSERT_EQ(back.size(), samples.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].cloud.points, samples[i].cloud.points);
    EXPECT_EQ(back[i].label, samples[i].label);
  }

  auto j = nlohmann::json::parse(std::ifstream(manifest));
  j.erase("samples");
  const auto regen = read_orbit_dataset(dir.write("header_only.json", j.dump()));
  ASSERT_EQ(regen.size(), samples.size());
  EXPECT_EQ(regen[3].cloud.points, samples[3].cloud.points);

  std::filesystem::resize_file(dir.file(samples[0].name), 20);
  EXPECT_THROW(read_cloud(dir.file(samples[0].name)), std::runtime_error);
}

TEST(Folds, StratifiedPartition) {
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) labels.push_back(i % 2);
  const auto folds = stratified_folds(labels, 5, 3);
  ASSERT_EQ(folds.size(), 5u);
  std::set<std::size_t> seen;
  for (const auto& f : folds) {
    ASSERT_EQ(f.size(), 2u);
    EXPECT_NE(labels[f[0]], labels[f[1]]);
    seen.insert(f.begin(), f.end());
  }
  EXPECT_EQ(seen.size(), 10u);
  EXPECT_EQ(stratified_folds(labels, 5, 3), folds);
  EXPECT_THROW(stratified_folds(labels, 6, 0), std::invalid_argument);
}

TEST(Folds, PartitionPropertyOnRandomLabels) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + rng() % 4;
    const int folds = 2 + rng() % 4;
    std::vector<int> labels;
    for (int c = 0; c < k; ++c) {
      for (int i = 0, n = folds + rng() % 10; i < n; ++i) labels.push_back(c);
    }
    std::shuffle(labels.begin(), labels.end(), rng);
    const auto f = stratified_folds(labels, folds, trial);
    std::vector<int> count(labels.size(), 0);
    std::size_t smallest = labels.size(), largest = 0;
    for (const auto& fold : f) {
      for (auto i : fold) ++count[i];
      smallest = std::min(smallest, fold.size());
      largest = std::max(largest, fold.size());
    }
    for (int c : count) EXPECT_EQ(c, 1);
    EXPECT_LE(largest - smallest, 1u);
  }
}

TEST(Split, PerClassRounding) {
  std::vector<int> labels(10, 0);
  labels.resize(20, 1);
  const auto [train, test] = stratified_split(labels, 0.3, 1);
  EXPECT_EQ(test.size(), 6u);
  EXPECT_EQ(train.size(), 14u);
  EXPECT_TRUE(std::is_sorted(test.begin(), test.end()));
  EXPECT_EQ(std::count_if(test.begin(), test.end(), [&](auto i) { return labels[i] == 0; }), 3);
}

TEST(Features, OrbitCountsArePreserved) {
  OrbitOptions o;
  o.per_class = 2;
  o.points = 200;
  FeatureParams p;
  for (const auto& s : generate_orbit_dataset(o)) {
    const auto f = orbit_features(s.cloud, p);
    ASSERT_EQ(f.per_dim.size(), 2u);
    const auto diagrams = persistence(weak_alpha_filtration(s.cloud, p.jitter_seed), 1, p.essential);
    for (int d = 0; d < 2; ++d) {
      EXPECT_EQ(f.per_dim[d].total(), diagrams[d].points.size());
      EXPECT_EQ(f.per_dim[d].resolution(), 50);
    }
    // One fewer dim-0 class than the cap policy keeps.
    const auto capped = persistence(weak_alpha_filtration(s.cloud, 0), 1, EssentialPolicy::cap);
    EXPECT_EQ(capped[0].points.size(), diagrams[0].points.size() + 1);
  }
}

TEST(Features, TriangleEndToEnd) {
  const Graph g(3, {{0, 1}, {0, 2}, {1, 2}});
  FeatureParams p;
  p.resolution = 10;
  const auto f = graph_features(g, p);
  EXPECT_EQ(f.task, Task::graph);
  EXPECT_EQ(f.extended.channels[2].total(), 1u);
  EXPECT_EQ(f.extended.channels[3].total(), 1u);
  const auto input = to_model_input(f, 5);
  ASSERT_EQ(input.groups.size(), 1u);
  EXPECT_GE(input.groups[0].patches.size(), 1u);
  EXPECT_EQ(nlohmann::json(f).get<SampleFeatures>(), f);
}

TEST(Features, KeysTrackEveryParameter) {
  const Graph g(3, {{0, 1}, {1, 2}});
  FeatureParams p;
  const auto k = feature_key(g, p);
  EXPECT_EQ(k.size(), 64u);
  EXPECT_EQ(feature_key(g, p), k);
  auto q = p;
  q.resolution = 20;
  EXPECT_NE(feature_key(g, q), k);
  q = p;
  q.diffusion_time = 2.0;
  EXPECT_NE(feature_key(g, q), k);
  EXPECT_NE(feature_key(Graph(3, {{0, 1}, {0, 2}}), p), k);
  PointCloud2D pc{{{0, 0}, {1, 0}}};
  auto pc2 = pc;
  pc2.points[1].x = std::nextafter(1.0, 2.0);
  EXPECT_NE(feature_key(pc, p), feature_key(pc2, p));
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(FeatureCache, WarmRunHitsAndMatchesColdRun) {
  TempDir dir("cache");
  OrbitOptions o;
  o.per_class = 2;
  o.points = 80;
  const auto samples = generate_orbit_dataset(o);
  FeatureParams p;
  const FeatureCache cache(dir.file("cache"));
  const auto cold = build_features(samples, p, cache);
  EXPECT_EQ(cold.cache.misses, samples.size());
  EXPECT_EQ(cold.computed, samples.size());
  const auto warm = build_features(samples, p, cache);
  EXPECT_EQ(warm.cache.hits, samples.size());
  EXPECT_EQ(warm.computed, 0u);
  EXPECT_EQ(warm.features, cold.features);
  EXPECT_EQ(build_features(samples, p, FeatureCache{}, kernels::Exec::serial).features, cold.features);

  // A damaged entry is recomputed.
  std::ofstream(cache.path_for(feature_key(samples[4].cloud, p))) << "{ truncated";
  ::testing::internal::CaptureStderr();
  const auto healed = build_features(samples, p, cache);
  const auto err = ::testing::internal::GetCapturedStderr();
  EXPECT_EQ(healed.cache.corrupt, 1u);
  EXPECT_EQ(healed.computed, 1u);
  EXPECT_NE(err.find("warning"), std::string::npos) << err;
  EXPECT_EQ(healed.features, cold.features);
  EXPECT_EQ(build_features(samples, p, cache).cache.hits, samples.size());
}

TEST(Tokens, BenchmarkExamples) {
  SampleFeatures a;
  a.task = Task::orbit;
  a.per_dim = {Ppd(10), Ppd(10)};
  a.per_dim[0].at(0, 0) = 1;
  a.per_dim[0].at(9, 9) = 2;
  a.per_dim[1].at(1, 1) = 1;
  SampleFeatures b = a;
  b.per_dim[0].at(0, 1) = 1;
  b.per_dim[1] = Ppd(10);
  const std::vector<SampleFeatures> fs{a, b};
  const auto t = benchmark_tokens(fs, 5);
  EXPECT_EQ(t.samples, 2u);
  ASSERT_EQ(t.groups.size(), 2u);
  EXPECT_EQ(t.groups[0], (TokenGroupStats{"dim0", 2.0, 2, 2}));
  EXPECT_EQ(t.groups[1], (TokenGroupStats{"dim1", 0.5, 0, 1}));
}

TEST(Tokens, EmptyAndSingleSample) {
  SampleFeatures empty;
  empty.task = Task::graph;
  for (auto& ch : empty.extended.channels) ch = Ppd(10);
  const std::vector<SampleFeatures> none{empty, empty};
  const auto t = benchmark_tokens(none, 5);
  ASSERT_EQ(t.groups.size(), 1u);
  EXPECT_EQ(t.groups[0], (TokenGroupStats{"extended", 0.0, 0, 0}));

  SampleFeatures seven;
  for (auto& ch : seven.extended.channels) ch = Ppd(20);
  for (int k = 0; k < 7; ++k) seven.extended.channels[k % 4].at(5 * (k / 4), 5 * (k % 4)) = 1;
  const std::vector<SampleFeatures> one{seven};
  EXPECT_EQ(benchmark_tokens(one, 5).groups[0], (TokenGroupStats{"extended", 7.0, 7, 7}));
}

TEST(Metrics, SummaryAndJsonRoundTrip) {
  MetricsReport r;
  r.task = "graph";
  r.mode = "cross-validate";
  r.runs = {{0, 0, 8, 2, 0.5}, {0, 1, 8, 2, 1.0}};
  summarize(r);
  EXPECT_DOUBLE_EQ(r.mean, 0.75);
  EXPECT_DOUBLE_EQ(r.std, 0.25);
  r.tokens = {3, {{"extended", 1.5, 1, 2}}};
  const nlohmann::json j = r;
  std::set<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.insert(k);
  EXPECT_EQ(keys, (std::set<std::string>{"schema", "task", "mode", "runs", "mean", "std", "tokens"}));
  EXPECT_EQ(j["schema"], "xpert-metrics/1");
  EXPECT_EQ(j.get<MetricsReport>(), r);
  r.wall_clock_seconds = 1.5;
  EXPECT_EQ(nlohmann::json(r).get<MetricsReport>(), r);
}

TEST(Metrics, GoldenSchema) {
  MetricsReport r;
  r.task = "graph";
  r.mode = "cross-validate";
  r.runs = {{3, 0, 8, 2, 0.5}, {3, 1, 8, 2, 1.0}};
  r.tokens = {10, {{"extended", 1.5, 1, 2}}};
  summarize(r);
  TempDir dir("golden");
  write_json_file(dir.file("report.json"), r);
  std::ifstream got(dir.file("report.json")), want(XPERT_GOLDEN_DIR "/metrics_report.json");
  std::stringstream a, b;
  a << got.rdbuf();
  b << want.rdbuf();
  EXPECT_EQ(a.str(), b.str());
}

TEST(ExperimentConfig, ValidationAndJson) {
  auto c = default_experiment(Task::orbit);
  EXPECT_EQ(c.model.depth, 2);
  EXPECT_EQ(c.model.dim, 64);
  EXPECT_EQ(c.model.num_classes, 5);
  EXPECT_EQ(default_experiment(Task::graph, true).model.dim, 192);
  EXPECT_THROW(c.validate(false), std::invalid_argument);  // no dataset yet
  c.dataset = "manifest.json";
  EXPECT_NO_THROW(c.validate(false));
  EXPECT_EQ(nlohmann::json(c).get<ExperimentConfig>().model, c.model);
  const auto partial = nlohmann::json::parse(R"({"task": "orbit", "training": {"epochs": 7}})")
                           .get<ExperimentConfig>();
  EXPECT_EQ(partial.training.epochs, 7);
  EXPECT_EQ(partial.training.lr, c.training.lr);
  EXPECT_EQ(partial.model, c.model);
  auto bad = c;
  bad.features.resolution = 40;
  EXPECT_THROW(bad.validate(false), std::invalid_argument);
  bad = c;
  bad.model.input_mode = InputMode::extended;
  EXPECT_THROW(bad.validate(false), std::invalid_argument);
  bad = c;
  bad.training.warmup_epochs = bad.training.epochs + 1;
  EXPECT_THROW(bad.validate(false), std::invalid_argument);
}

TEST(Training, SeparableToyReachesFullAccuracy) {
  auto c = default_experiment(Task::graph).model;
  c.depth = 1;
  c.dim = 16;
  c.heads = 2;
  c.resolution = 10;
  std::vector<ModelInput> inputs;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    ExtendedPpd x;
    for (auto& ch : x.channels) ch = Ppd(10);
    const int label = i % 2;
    x.channels[label == 0 ? 0 : 2].at(i % 5, (i / 5) % 5) = 1;
    inputs.push_back(make_extended_input(x, 5));
    labels.push_back(label);
  }
  TrainOptions t{.epochs = 30, .batch_size = 8, .lr = 1e-2, .weight_decay = 0.0, .warmup_epochs = 2};
  int epochs_seen = 0;
  const auto params = train_model(inputs, labels, c, t, 0, kernels::Exec::parallel,
                                  [&](int, double) { ++epochs_seen; });
  EXPECT_EQ(epochs_seen, 30);
  EXPECT_EQ(accuracy(params, inputs, labels), 1.0);
}

TEST(CrossValidation, DeterministicAndCached) {
  TempDir dir("cv");
  const auto c = tiny_graph_experiment(write_graph_dataset(dir, 8), dir.file("cache"));
  const auto data = load_dataset(c);
  EXPECT_EQ(data.computed, 16u);
  const auto a = run_cv(c, data);
  ASSERT_EQ(a.runs.size(), 8u);
  EXPECT_EQ(a.mode, "cross-validate");
  for (const auto& r : a.runs) EXPECT_EQ(r.train_size + r.test_size, 16u);
  const auto warm = load_dataset(c);
  EXPECT_EQ(warm.cache.hits, 16u);
  EXPECT_EQ(nlohmann::json(run_cv(c, warm)).dump(), nlohmann::json(a).dump());
  EXPECT_EQ(nlohmann::json(run_cv(c, data, kernels::Exec::serial)).dump(),
            nlohmann::json(run_cv(c, data, kernels::Exec::serial)).dump());

  ModelParameters kept;
  const auto split = run_split(c, data, kernels::Exec::parallel, &kept);
  EXPECT_EQ(split.runs.size(), 2u);
  EXPECT_EQ(split.runs[0].test_size, 4u);  // round(0.3 * 8) per class
  EXPECT_EQ(kept.values.size(), ModelParameters::initialize(c.model, 0).values.size());
}

TEST(StabilitySuites, NoViolations) {
  const auto results = run_stability_suites(50, 11);
  ASSERT_EQ(results.size(), 3u);
  EXPECT_EQ(results[0].suite, "projection-cost");
  EXPECT_EQ(results[1].suite, "rotation-stability");
  EXPECT_EQ(results[2].suite, "projected-stability");
  for (const auto& r : results) {
    EXPECT_EQ(r.violations, 0u) << r.suite;
    EXPECT_GT(r.cases, 0u);
    EXPECT_LE(r.worst_ratio, 1.0 + 1e-9) << r.suite;
  }
}

TEST(CrossValidation, SeparablePointCloudsReachFullAccuracy) {
  // Tight cluster against two distant clusters.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  std::vector<OrbitSample> samples;
  for (int i = 0; i < 20; ++i) {
    OrbitSample s;
    s.name = "cloud" + std::to_string(i) + ".bin";
    s.label = i % 2;
    for (int k = 0; k < 30; ++k) {
      const double cx = s.label == 0 ? 0.5 : (k % 2 == 0 ? 0.1 : 0.9);
      s.cloud.points.push_back({cx + u(rng), 0.5 + u(rng)});
    }
    samples.push_back(std::move(s));
  }
  TempDir dir("separable");
  OrbitOptions o;
  o.r_values = {1.0, 2.0};
  o.per_class = 10;
  o.points = 30;
  auto c = default_experiment(Task::orbit);
  c.dataset = write_orbit_dataset(dir.path(), o, samples);
  c.model.num_classes = 2;
  c.model.depth = 1;
  c.model.dim = 16;
  c.model.heads = 2;
  c.training.epochs = 20;
  c.training.warmup_epochs = 2;
  c.training.batch_size = 8;
  c.training.lr = 1e-2;
  c.folds = 5;
  const auto report = run_cv(c, load_dataset(c));
  EXPECT_EQ(report.mean, 1.0);
}
