// Command-line driver for the feature, training and evaluation pipeline.
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "xpert/checkpoint.hpp"
#include "xpert/dataset.hpp"
#include "xpert/diagram_io.hpp"
#include "xpert/experiment.hpp"
#include "xpert/stability.hpp"

using namespace xpert;

namespace {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::string config_path;
  std::string cache_dir;
  std::string out;
  std::string task = "orbit";
  std::string dataset;
  bool paper_scale = false;
};

// Thrown for bad user input; maps to exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExperimentConfig make_config(const GlobalOptions& g) {
  ExperimentConfig c;
  if (!g.config_path.empty()) {
    c = read_json_file(g.config_path).get<ExperimentConfig>();
  } else {
    c = default_experiment(parse_task(g.task), g.paper_scale);
  }
  if (!g.dataset.empty()) c.dataset = g.dataset;
  if (!g.cache_dir.empty()) c.cache_dir = g.cache_dir;
  if (!g.seeds.empty()) c.seeds = g.seeds;
  if (g.seed) c.seeds = {*g.seed};
  return c;
}

void emit(const GlobalOptions& g, const nlohmann::json& j) {
  if (g.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json_file(g.out, j);
  }
}

void log_cache(const Dataset& d) {
  std::cerr << "features: " << d.features.size() << " samples, " << d.cache.hits << " cache hits, "
            << d.cache.misses << " misses (" << d.cache.corrupt << " corrupt), " << d.computed
            << " computed\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xpert: persistence-diagram transformer pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Single seed (overrides the config)");
  app.add_option("--seeds", g.seeds, "Several seeds (overrides the config)");
  app.add_option("--config", g.config_path, "Experiment config JSON")->check(CLI::ExistingFile);
  app.add_option("--cache-dir", g.cache_dir, "Feature cache directory");
  app.add_option("--out", g.out, "Write the JSON result here instead of stdout");
  app.add_option("--task", g.task, "graph or orbit, when no --config is given")
      ->check(CLI::IsMember({"graph", "orbit"}));
  app.add_option("--dataset", g.dataset, "Dataset manifest (overrides the config)");
  app.add_flag("--paper-scale", g.paper_scale, "Full-size model and schedule defaults");

  auto* gen = app.add_subcommand("generate-orbit", "Generate an orbit point-cloud dataset");
  std::string gen_dir;
  OrbitOptions orbit_opts;
  gen->add_option("--dir", gen_dir, "Output directory")->required();
  gen->add_option("--per-class", orbit_opts.per_class, "Orbits per parameter value");
  gen->add_option("--points", orbit_opts.points, "Points per orbit");
  gen->add_option("--r-values", orbit_opts.r_values, "Orbit parameters, one class each");

  auto* feats = app.add_subcommand("compute-features", "Build (and cache) features for a dataset");

  auto* train = app.add_subcommand("train", "Train on stratified train/test splits");
  std::string checkpoint_out;
  std::optional<int> epochs;
  std::optional<double> lr;
  std::optional<int> warmup;
  bool timing = false;
  train->add_option("--checkpoint", checkpoint_out, "Save the first seed's model here");
  for (auto* sub : {train, app.add_subcommand("cross-validate", "Stratified k-fold evaluation")}) {
    sub->add_option("--epochs", epochs, "Override training epochs");
    sub->add_option("--lr", lr, "Override the base learning rate");
    sub->add_option("--warmup-epochs", warmup, "Override the warmup length");
    sub->add_flag("--timing", timing, "Include wall-clock seconds in the report");
  }
  auto* cv = app.get_subcommand("cross-validate");
  std::optional<int> folds;
  cv->add_option("--folds", folds, "Number of folds");

  auto* eval = app.add_subcommand("evaluate", "Accuracy of a checkpoint on the test split");
  std::string checkpoint_in;
  eval->add_option("--checkpoint", checkpoint_in, "Checkpoint file")->required()->check(CLI::ExistingFile);

  auto* tokens = app.add_subcommand("benchmark-tokens", "Non-zero patch statistics");

  auto* stab = app.add_subcommand("stability-check", "Random-diagram checks of the stability bounds");
  std::size_t cases = 200;
  stab->add_option("--cases", cases, "Cases per suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      orbit_opts.seed = g.seed.value_or(0);
      const auto samples = generate_orbit_dataset(orbit_opts);
      const auto manifest = write_orbit_dataset(gen_dir, orbit_opts, samples);
      emit(g, {{"manifest", manifest}, {"samples", samples.size()}});
      return 0;
    }
    if (stab->parsed()) {
      nlohmann::json out = nlohmann::json::array();
      bool ok = true;
      for (const auto& r : run_stability_suites(cases, g.seed.value_or(0))) {
        std::cerr << r.suite << ": " << r.cases << " cases, worst lhs/bound " << r.worst_ratio
                  << ", violations " << r.violations << "\n";
        out.push_back({{"suite", r.suite},
                       {"cases", r.cases},
                       {"worst_ratio", r.worst_ratio},
                       {"violations", r.violations}});
        ok = ok && r.violations == 0;
      }
      emit(g, out);
      return ok ? 0 : 1;
    }

    auto config = make_config(g);
    if (epochs) config.training.epochs = *epochs;
    if (lr) config.training.lr = *lr;
    if (warmup) config.training.warmup_epochs = *warmup;
    if (folds) config.folds = *folds;
    if (config.dataset.empty()) throw ValidationError("no dataset: pass --dataset or --config");

    const auto t0 = std::chrono::steady_clock::now();
    const auto data = load_dataset(config);
    log_cache(data);

    if (feats->parsed()) {
      emit(g, {{"samples", data.features.size()},
               {"computed", data.computed},
               {"cache", {{"hits", data.cache.hits}, {"misses", data.cache.misses}, {"corrupt", data.cache.corrupt}}}});
    } else if (tokens->parsed()) {
      emit(g, benchmark_tokens(data.features, config.model.patch_size));
    } else if (train->parsed() || cv->parsed()) {
      ModelParameters first;
      auto report = cv->parsed() ? run_cv(config, data)
                                 : run_split(config, data, kernels::Exec::parallel,
                                             checkpoint_out.empty() ? nullptr : &first);
      if (!checkpoint_out.empty()) save_checkpoint(first, checkpoint_out);
      if (timing) report.wall_clock_seconds = seconds_since(t0);
      std::cerr << report.mode << ": accuracy " << report.mean << " +- " << report.std << " over "
                << report.runs.size() << " runs\n";
      emit(g, report);
    } else if (eval->parsed()) {
      const auto params = load_checkpoint(checkpoint_in);
      const auto [train_idx, test_idx] =
          stratified_split(data.labels, config.test_fraction, config.seeds.front());
      std::vector<ModelInput> inputs;
      std::vector<int> labels;
      for (std::size_t i : test_idx) {
        inputs.push_back(to_model_input(data.features[i], params.config.patch_size));
        labels.push_back(data.labels[i]);
      }
      const double acc = accuracy(params, inputs, labels);
      std::cerr << "evaluate: accuracy " << acc << " on " << labels.size() << " samples\n";
      emit(g, {{"accuracy", acc}, {"samples", labels.size()}, {"seed", config.seeds.front()}});
    }
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
