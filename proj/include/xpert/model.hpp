#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "xpert/kernels.hpp"
#include "xpert/ppd.hpp"

namespace xpert {

enum class InputMode { extended, ordinary };

struct ModelConfig {
  int depth = 5;
  int heads = 8;
  int dim = 192;
  int resolution = 50;
  int patch_size = 5;
  int num_classes = 2;
  double mlp_ratio = 4.0;
  InputMode input_mode = InputMode::extended;
  /// Highest homology dimension in ordinary mode; one token group (and one
  /// projection matrix) per dimension 0..max_homology_dim.
  int max_homology_dim = 1;

  int channels() const { return input_mode == InputMode::extended ? 4 : 1; }
  int num_groups() const { return input_mode == InputMode::extended ? 1 : max_homology_dim + 1; }
  int hidden() const { return static_cast<int>(mlp_ratio * dim); }
  int head_dim() const { return dim / heads; }
  std::size_t patch_length() const {
    return static_cast<std::size_t>(channels()) * patch_size * patch_size;
  }
  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

struct TensorInfo {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// Canonical parameter order and offsets into the flat parameter vector.
class ParameterLayout {
 public:
  explicit ParameterLayout(const ModelConfig& config);

  const std::vector<TensorInfo>& tensors() const { return tensors_; }
  std::size_t total() const { return total_; }
  const TensorInfo& find(const std::string& name) const;

  struct Layer {
    std::size_t ln1_w, ln1_b, qkv_w, qkv_b, proj_w, proj_b;
    std::size_t ln2_w, ln2_b, fc1_w, fc1_b, fc2_w, fc2_b;
  };
  std::vector<std::size_t> embed;  // one projection per token group
  std::size_t cls = 0;
  std::vector<Layer> layers;
  std::size_t norm_w = 0, norm_b = 0, head_w = 0, head_b = 0;

 private:
  std::size_t add(std::string name, std::vector<std::size_t> shape);

  std::vector<TensorInfo> tensors_;
  std::size_t total_ = 0;
};

/// All learnable tensors stored contiguously; every scalar has a stable flat
/// index given by the layout.
struct ModelParameters {
  ModelConfig config;
  std::shared_ptr<const ParameterLayout> layout;
  std::vector<double> values;

  /// Weight matrices and the cls token ~ N(0, 0.02^2), biases 0, layer-norm
  /// gains 1.
  static ModelParameters initialize(const ModelConfig& config, std::uint64_t seed);

  std::span<double> tensor(const std::string& name);
  std::span<const double> tensor(const std::string& name) const;
};

/// Patches of one sample, one PatchSequence per token group.
struct ModelInput {
  std::vector<PatchSequence> groups;
};

ModelInput make_extended_input(const ExtendedPpd& x, int patch_size);
ModelInput make_ordinary_input(std::span<const Ppd> per_dim, int patch_size);

struct TokenPosition {
  bool is_cls = false;
  int row = 0;
  int col = 0;
  int group = 0;
};

struct TokenSequence {
  std::size_t dim = 0;
  std::vector<double> embeddings;  // length x dim, row-major; row 0 is [cls]
  std::vector<TokenPosition> positions;

  std::size_t length() const { return positions.size(); }
};

/// Fixed 2D sinusoidal code: first half encodes `row`, second half `col`.
std::vector<double> positional_encoding_2d(int row, int col, int dim);

/// E * patch + positional code for every patch, [cls] prepended (without a
/// positional code).
TokenSequence embed_patches(const PatchSequence& seq, const ModelParameters& params);
TokenSequence embed_input(const ModelInput& input, const ModelParameters& params);

/// Each per-dimension PPD is patchified as a single-channel image and
/// projected with its own matrix; tokens of lower dimensions come first.
TokenSequence tokenize_ordinary(std::span<const Ppd> per_dim, const ModelParameters& params);

/// Class probabilities for one token sequence.
std::vector<double> forward(const TokenSequence& tokens, const ModelParameters& params,
                            kernels::Exec exec = kernels::Exec::parallel);
std::vector<double> predict_proba(const ModelInput& input, const ModelParameters& params,
                                  kernels::Exec exec = kernels::Exec::parallel);

struct LossAndGradients {
  double loss = 0.0;
  std::vector<double> grads;  // same layout as ModelParameters::values
};

/// Mean cross-entropy over the batch and its analytic gradient. Exec::serial
/// runs the reference kernels one sample at a time. Exec::parallel spreads
/// samples over threads and reduces per-sample gradients in sample order, so
/// its result does not depend on the thread count.
LossAndGradients loss_and_gradients(std::span<const ModelInput> batch, std::span<const int> labels,
                                    const ModelParameters& params,
                                    kernels::Exec exec = kernels::Exec::parallel);

/// Loss only (used by finite-difference checks).
double batch_loss(std::span<const ModelInput> batch, std::span<const int> labels,
                  const ModelParameters& params);

}  // namespace xpert
