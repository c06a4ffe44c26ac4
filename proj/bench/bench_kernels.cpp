// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to compare
// thread counts.
#include <benchmark/benchmark.h>

#include <random>

#include "xpert/experiment.hpp"
#include "xpert/kernels.hpp"

using namespace xpert;
using kernels::Exec;

namespace {

std::vector<double> randn(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void BM_LinearForward(benchmark::State& state, Exec exec) {
  const std::size_t rows = state.range(0), in = state.range(1), out = state.range(2);
  const auto x = randn(rows * in, 1), w = randn(out * in, 2), b = randn(out, 3);
  std::vector<double> y(rows * out);
  for (auto _ : state) {
    kernels::linear_forward(exec, x, w, b, rows, in, out, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * rows * in * out);
}

void BM_LinearBackward(benchmark::State& state, Exec exec) {
  const std::size_t rows = state.range(0), in = state.range(1), out = state.range(2);
  const auto x = randn(rows * in, 1), w = randn(out * in, 2), dy = randn(rows * out, 3);
  std::vector<double> dx(rows * in), dw(out * in), db(out);
  for (auto _ : state) {
    kernels::linear_backward(exec, x, w, dy, rows, in, out, dx, dw, db);
    benchmark::DoNotOptimize(dw.data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * rows * in * out);
}

struct Batch {
  ModelParameters params;
  std::vector<ModelInput> inputs;
  std::vector<int> labels;
};

// Orbit-shaped batch at desk scale.
const Batch& orbit_batch() {
  static const Batch batch = [] {
    Batch b;
    const auto config = default_experiment(Task::orbit);
    b.params = ModelParameters::initialize(config.model, 0);
    OrbitOptions o;
    o.per_class = 13;
    for (const auto& s : generate_orbit_dataset(o)) {
      b.inputs.push_back(to_model_input(orbit_features(s.cloud, config.features), 5));
      b.labels.push_back(s.label);
      if (b.inputs.size() == 64) break;
    }
    return b;
  }();
  return batch;
}

void BM_LossAndGradients(benchmark::State& state, Exec exec) {
  const auto& b = orbit_batch();
  for (auto _ : state) {
    auto r = loss_and_gradients(b.inputs, b.labels, b.params, exec);
    benchmark::DoNotOptimize(r.loss);
  }
  state.SetItemsProcessed(state.iterations() * b.inputs.size());
}

void BM_OrbitFeatures(benchmark::State& state, Exec exec) {
  OrbitOptions o;
  o.per_class = 4;
  o.points = 1000;
  const auto samples = generate_orbit_dataset(o);
  const FeatureParams p;
  for (auto _ : state) {
    auto f = build_features(samples, p, FeatureCache{}, exec);
    benchmark::DoNotOptimize(f.features.data());
  }
  state.SetItemsProcessed(state.iterations() * samples.size());
}

}  // namespace

BENCHMARK_CAPTURE(BM_LinearForward, serial, Exec::serial)->Args({64, 64, 192})->Args({256, 192, 768});
BENCHMARK_CAPTURE(BM_LinearForward, parallel, Exec::parallel)->Args({64, 64, 192})->Args({256, 192, 768});
BENCHMARK_CAPTURE(BM_LinearBackward, serial, Exec::serial)->Args({64, 64, 192})->Args({256, 192, 768});
BENCHMARK_CAPTURE(BM_LinearBackward, parallel, Exec::parallel)->Args({64, 64, 192})->Args({256, 192, 768});
BENCHMARK_CAPTURE(BM_LossAndGradients, serial, Exec::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LossAndGradients, parallel, Exec::parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_OrbitFeatures, serial, Exec::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_OrbitFeatures, parallel, Exec::parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
