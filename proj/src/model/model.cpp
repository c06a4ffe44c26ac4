#include "xpert/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace xpert {

using kernels::Exec;

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("model config: " + what); };
  if (depth < 0) fail("depth must be non-negative");
  if (heads <= 0) fail("heads must be positive");
  if (dim <= 0 || dim % heads != 0) fail("dim must be a positive multiple of heads");
  if (dim % 4 != 0) fail("dim must be divisible by 4");
  if (resolution <= 0 || patch_size <= 0 || resolution % patch_size != 0) {
    fail("patch_size must divide resolution");
  }
  if (num_classes <= 0) fail("num_classes must be positive");
  if (!(mlp_ratio > 0.0) || hidden() <= 0) fail("mlp_ratio must give a positive hidden width");
  if (max_homology_dim < 0) fail("max_homology_dim must be non-negative");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"depth", c.depth},
                     {"heads", c.heads},
                     {"dim", c.dim},
                     {"resolution", c.resolution},
                     {"patch_size", c.patch_size},
                     {"num_classes", c.num_classes},
                     {"mlp_ratio", c.mlp_ratio},
                     {"input_mode", c.input_mode == InputMode::extended ? "extended" : "ordinary"},
                     {"max_homology_dim", c.max_homology_dim}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  ModelConfig d;
  c.depth = j.value("depth", d.depth);
  c.heads = j.value("heads", d.heads);
  c.dim = j.value("dim", d.dim);
  c.resolution = j.value("resolution", d.resolution);
  c.patch_size = j.value("patch_size", d.patch_size);
  c.num_classes = j.value("num_classes", d.num_classes);
  c.mlp_ratio = j.value("mlp_ratio", d.mlp_ratio);
  const std::string mode = j.value("input_mode", std::string("extended"));
  if (mode == "extended") {
    c.input_mode = InputMode::extended;
  } else if (mode == "ordinary") {
    c.input_mode = InputMode::ordinary;
  } else {
    throw std::invalid_argument("model config: unknown input_mode \"" + mode + "\"");
  }
  c.max_homology_dim = j.value("max_homology_dim", d.max_homology_dim);
}

// ---------------------------------------------------------------------------
// Parameters

ParameterLayout::ParameterLayout(const ModelConfig& config) {
  config.validate();
  const std::size_t d = config.dim;
  const std::size_t hid = config.hidden();
  for (int g = 0; g < config.num_groups(); ++g) {
    embed.push_back(add("embed." + std::to_string(g) + ".weight", {d, config.patch_length()}));
  }
  cls = add("cls", {d});
  for (int l = 0; l < config.depth; ++l) {
    const std::string p = "layers." + std::to_string(l) + ".";
    Layer layer{};
    layer.ln1_w = add(p + "ln1.weight", {d});
    layer.ln1_b = add(p + "ln1.bias", {d});
    layer.qkv_w = add(p + "attn.qkv.weight", {3 * d, d});
    layer.qkv_b = add(p + "attn.qkv.bias", {3 * d});
    layer.proj_w = add(p + "attn.proj.weight", {d, d});
    layer.proj_b = add(p + "attn.proj.bias", {d});
    layer.ln2_w = add(p + "ln2.weight", {d});
    layer.ln2_b = add(p + "ln2.bias", {d});
    layer.fc1_w = add(p + "mlp.fc1.weight", {hid, d});
    layer.fc1_b = add(p + "mlp.fc1.bias", {hid});
    layer.fc2_w = add(p + "mlp.fc2.weight", {d, hid});
    layer.fc2_b = add(p + "mlp.fc2.bias", {d});
    layers.push_back(layer);
  }
  norm_w = add("norm.weight", {d});
  norm_b = add("norm.bias", {d});
  head_w = add("head.weight", {static_cast<std::size_t>(config.num_classes), d});
  head_b = add("head.bias", {static_cast<std::size_t>(config.num_classes)});
}

std::size_t ParameterLayout::add(std::string name, std::vector<std::size_t> shape) {
  const std::size_t size =
      std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  tensors_.push_back({std::move(name), std::move(shape), total_, size});
  total_ += size;
  return tensors_.back().offset;
}

const TensorInfo& ParameterLayout::find(const std::string& name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return t;
  }
  throw std::out_of_range("no parameter tensor named " + name);
}

ModelParameters ModelParameters::initialize(const ModelConfig& config, std::uint64_t seed) {
  ModelParameters p;
  p.config = config;
  p.layout = std::make_shared<const ParameterLayout>(config);
  p.values.assign(p.layout->total(), 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.02);
  for (const auto& t : p.layout->tensors()) {
    auto view = std::span<double>(p.values).subspan(t.offset, t.size);
    const bool is_gain = t.name.ends_with("ln1.weight") || t.name.ends_with("ln2.weight") ||
                         t.name == "norm.weight";
    if (is_gain) {
      std::fill(view.begin(), view.end(), 1.0);
    } else if (t.shape.size() == 2 || t.name == "cls") {
      for (double& v : view) v = normal(rng);
    }
  }
  return p;
}

std::span<double> ModelParameters::tensor(const std::string& name) {
  const auto& t = layout->find(name);
  return std::span<double>(values).subspan(t.offset, t.size);
}

std::span<const double> ModelParameters::tensor(const std::string& name) const {
  const auto& t = layout->find(name);
  return std::span<const double>(values).subspan(t.offset, t.size);
}

// ---------------------------------------------------------------------------
// Tokenization

ModelInput make_extended_input(const ExtendedPpd& x, int patch_size) {
  return ModelInput{{patchify(x, patch_size)}};
}

ModelInput make_ordinary_input(std::span<const Ppd> per_dim, int patch_size) {
  ModelInput input;
  for (const auto& ppd : per_dim) input.groups.push_back(patchify(std::span<const Ppd>(&ppd, 1), patch_size));
  return input;
}

std::vector<double> positional_encoding_2d(int row, int col, int dim) {
  if (dim <= 0 || dim % 4 != 0) throw std::invalid_argument("positional encoding: dim must be divisible by 4");
  const int half = dim / 2;
  std::vector<double> code(static_cast<std::size_t>(dim));
  for (int part = 0; part < 2; ++part) {
    const double pos = part == 0 ? row : col;
    for (int i = 0; i < half / 2; ++i) {
      const double angle = pos / std::pow(10000.0, 2.0 * i / half);
      code[part * half + 2 * i] = std::sin(angle);
      code[part * half + 2 * i + 1] = std::cos(angle);
    }
  }
  return code;
}

TokenSequence embed_input(const ModelInput& input, const ModelParameters& params) {
  const auto& cfg = params.config;
  const auto& layout = *params.layout;
  if (static_cast<int>(input.groups.size()) != cfg.num_groups()) {
    throw std::invalid_argument("embed: expected " + std::to_string(cfg.num_groups()) +
                                " token groups, got " + std::to_string(input.groups.size()));
  }
  const std::size_t d = cfg.dim;
  const std::size_t len = cfg.patch_length();
  TokenSequence seq;
  seq.dim = d;
  seq.positions.push_back({true, 0, 0, 0});
  seq.embeddings.assign(params.values.begin() + layout.cls, params.values.begin() + layout.cls + d);
  for (std::size_t g = 0; g < input.groups.size(); ++g) {
    const auto& group = input.groups[g];
    if (group.patch_length() != len) {
      throw std::invalid_argument("embed: patch length " + std::to_string(group.patch_length()) +
                                  " does not match the model's " + std::to_string(len));
    }
    const double* e = params.values.data() + layout.embed[g];
    for (const auto& patch : group.patches) {
      if (patch.values.size() != len) throw std::invalid_argument("embed: malformed patch vector");
      auto token = positional_encoding_2d(patch.grid_row, patch.grid_col, cfg.dim);
      for (std::size_t j = 0; j < len; ++j) {
        const double v = patch.values[j];
        if (v == 0.0) continue;
        for (std::size_t r = 0; r < d; ++r) token[r] += e[r * len + j] * v;
      }
      seq.embeddings.insert(seq.embeddings.end(), token.begin(), token.end());
      seq.positions.push_back({false, patch.grid_row, patch.grid_col, static_cast<int>(g)});
    }
  }
  return seq;
}

TokenSequence embed_patches(const PatchSequence& seq, const ModelParameters& params) {
  return embed_input(ModelInput{{seq}}, params);
}

TokenSequence tokenize_ordinary(std::span<const Ppd> per_dim, const ModelParameters& params) {
  if (params.config.input_mode != InputMode::ordinary) {
    throw std::invalid_argument("tokenize_ordinary: model is not in ordinary mode");
  }
  return embed_input(make_ordinary_input(per_dim, params.config.patch_size), params);
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

constexpr double kLayerNormEps = 1e-5;

struct NormCache {
  std::vector<double> xhat;
  std::vector<double> rstd;
};

void layer_norm_forward(const double* x, std::size_t rows, std::size_t d, const double* gain,
                        const double* bias, double* y, NormCache& cache) {
  cache.xhat.resize(rows * d);
  cache.rstd.resize(rows);
  for (std::size_t t = 0; t < rows; ++t) {
    const double* xr = x + t * d;
    double mean = 0.0;
    for (std::size_t i = 0; i < d; ++i) mean += xr[i];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t i = 0; i < d; ++i) var += (xr[i] - mean) * (xr[i] - mean);
    var /= static_cast<double>(d);
    const double rstd = 1.0 / std::sqrt(var + kLayerNormEps);
    cache.rstd[t] = rstd;
    for (std::size_t i = 0; i < d; ++i) {
      const double xh = (xr[i] - mean) * rstd;
      cache.xhat[t * d + i] = xh;
      y[t * d + i] = gain[i] * xh + bias[i];
    }
  }
}

// dx += LN'(dy); dgain and dbias accumulate.
void layer_norm_backward(const double* dy, std::size_t rows, std::size_t d, const double* gain,
                         const NormCache& cache, double* dx, double* dgain, double* dbias) {
  std::vector<double> dxhat(d);
  for (std::size_t t = 0; t < rows; ++t) {
    const double* g = dy + t * d;
    const double* xh = cache.xhat.data() + t * d;
    double mean_dxhat = 0.0;
    double mean_dxhat_xhat = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      dgain[i] += g[i] * xh[i];
      dbias[i] += g[i];
      dxhat[i] = g[i] * gain[i];
      mean_dxhat += dxhat[i];
      mean_dxhat_xhat += dxhat[i] * xh[i];
    }
    mean_dxhat /= static_cast<double>(d);
    mean_dxhat_xhat /= static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) {
      dx[t * d + i] += cache.rstd[t] * (dxhat[i] - mean_dxhat - xh[i] * mean_dxhat_xhat);
    }
  }
}

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

inline double gelu_grad(double x) {
  constexpr double kInvSqrt2Pi = 0.3989422804014327;
  return 0.5 * (1.0 + std::erf(x * M_SQRT1_2)) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

void softmax_rows(double* s, std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* r = s + i * cols;
    const double mx = *std::max_element(r, r + cols);
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      r[j] = std::exp(r[j] - mx);
      sum += r[j];
    }
    for (std::size_t j = 0; j < cols; ++j) r[j] /= sum;
  }
}

struct LayerCache {
  std::vector<double> x_in;
  NormCache ln1;
  std::vector<double> h1;
  std::vector<double> qkv;
  std::vector<double> probs;  // heads x T x T
  std::vector<double> attn;
  std::vector<double> x_mid;
  NormCache ln2;
  std::vector<double> h2;
  std::vector<double> pre;
  std::vector<double> act;
};

struct Activations {
  std::size_t tokens = 0;
  std::vector<LayerCache> layers;
  std::vector<double> x_out;
  NormCache ln_f;
  std::vector<double> z;
  std::vector<double> probs;
};

template <class T>
std::span<const T> cspan(const std::vector<T>& v) {
  return std::span<const T>(v);
}

void forward_pass(const std::vector<double>& x0, std::size_t n_tokens, const ModelParameters& params,
                  Exec exec, Activations& act) {
  const auto& cfg = params.config;
  const auto& layout = *params.layout;
  const double* w = params.values.data();
  const std::span<const double> all(params.values);
  const std::size_t T = n_tokens;
  const std::size_t D = cfg.dim;
  const std::size_t H = cfg.heads;
  const std::size_t dh = cfg.head_dim();
  const std::size_t hid = cfg.hidden();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  act.tokens = T;
  act.layers.resize(layout.layers.size());
  std::vector<double> x = x0;
  for (std::size_t l = 0; l < layout.layers.size(); ++l) {
    const auto& L = layout.layers[l];
    auto& c = act.layers[l];
    c.x_in = x;
    c.h1.resize(T * D);
    layer_norm_forward(x.data(), T, D, w + L.ln1_w, w + L.ln1_b, c.h1.data(), c.ln1);

    c.qkv.resize(T * 3 * D);
    kernels::linear_forward(exec, cspan(c.h1), all.subspan(L.qkv_w, 3 * D * D),
                            all.subspan(L.qkv_b, 3 * D), T, D, 3 * D, c.qkv);
    c.probs.resize(H * T * T);
    c.attn.resize(T * D);
    for (std::size_t h = 0; h < H; ++h) {
      const double* q = c.qkv.data() + h * dh;
      const double* k = c.qkv.data() + D + h * dh;
      const double* v = c.qkv.data() + 2 * D + h * dh;
      double* p = c.probs.data() + h * T * T;
      kernels::matmul_nt(exec, q, 3 * D, k, 3 * D, T, T, dh, scale, p, T);
      softmax_rows(p, T, T);
      kernels::matmul_nn(exec, p, T, v, 3 * D, T, dh, T, c.attn.data() + h * dh, D, false);
    }
    std::vector<double> proj(T * D);
    kernels::linear_forward(exec, cspan(c.attn), all.subspan(L.proj_w, D * D),
                            all.subspan(L.proj_b, D), T, D, D, proj);
    for (std::size_t i = 0; i < T * D; ++i) x[i] += proj[i];
    c.x_mid = x;

    c.h2.resize(T * D);
    layer_norm_forward(x.data(), T, D, w + L.ln2_w, w + L.ln2_b, c.h2.data(), c.ln2);
    c.pre.resize(T * hid);
    kernels::linear_forward(exec, cspan(c.h2), all.subspan(L.fc1_w, hid * D),
                            all.subspan(L.fc1_b, hid), T, D, hid, c.pre);
    c.act.resize(T * hid);
    for (std::size_t i = 0; i < T * hid; ++i) c.act[i] = gelu(c.pre[i]);
    std::vector<double> mlp(T * D);
    kernels::linear_forward(exec, cspan(c.act), all.subspan(L.fc2_w, D * hid),
                            all.subspan(L.fc2_b, D), T, hid, D, mlp);
    for (std::size_t i = 0; i < T * D; ++i) x[i] += mlp[i];
  }
  act.x_out = std::move(x);

  // Only the [cls] row feeds the head.
  act.z.resize(D);
  layer_norm_forward(act.x_out.data(), 1, D, w + layout.norm_w, w + layout.norm_b, act.z.data(),
                     act.ln_f);
  const std::size_t K = cfg.num_classes;
  act.probs.resize(K);
  kernels::linear_forward(exec, cspan(act.z), all.subspan(layout.head_w, K * D),
                          all.subspan(layout.head_b, K), 1, D, K, act.probs);
  softmax_rows(act.probs.data(), 1, K);
}

// Accumulates d(loss * weight)/d(params) into grad and returns the loss.
double sample_gradient(const ModelInput& input, int label, const ModelParameters& params,
                       Exec exec, double weight, std::vector<double>& grad) {
  const auto& cfg = params.config;
  const auto& layout = *params.layout;
  if (label < 0 || label >= cfg.num_classes) {
    throw std::invalid_argument("loss: label " + std::to_string(label) + " outside [0, " +
                                std::to_string(cfg.num_classes) + ")");
  }
  const auto tokens = embed_input(input, params);
  const std::size_t T = tokens.length();
  const std::size_t D = cfg.dim;
  const std::size_t H = cfg.heads;
  const std::size_t dh = cfg.head_dim();
  const std::size_t hid = cfg.hidden();
  const std::size_t K = cfg.num_classes;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const double* w = params.values.data();
  const std::span<const double> all(params.values);
  double* g = grad.data();
  const std::span<double> gall(grad);

  Activations act;
  forward_pass(tokens.embeddings, T, params, exec, act);
  const double loss = -std::log(act.probs[label]);

  std::vector<double> dlogits(K);
  for (std::size_t k = 0; k < K; ++k) {
    dlogits[k] = weight * (act.probs[k] - (static_cast<int>(k) == label ? 1.0 : 0.0));
  }
  std::vector<double> dz(D, 0.0);
  kernels::linear_backward(exec, cspan(act.z), all.subspan(layout.head_w, K * D), cspan(dlogits), 1,
                           D, K, dz, gall.subspan(layout.head_w, K * D),
                           gall.subspan(layout.head_b, K));
  std::vector<double> dx(T * D, 0.0);
  layer_norm_backward(dz.data(), 1, D, w + layout.norm_w, act.ln_f, dx.data(), g + layout.norm_w,
                      g + layout.norm_b);

  std::vector<double> dmid, dact, dpre, dh2, dattn, dqkv, dh1, dA, dS;
  for (std::size_t li = layout.layers.size(); li-- > 0;) {
    const auto& L = layout.layers[li];
    const auto& c = act.layers[li];

    // x_out = x_mid + fc2(gelu(fc1(ln2(x_mid))))
    dmid = dx;
    dact.assign(T * hid, 0.0);
    kernels::linear_backward(exec, cspan(c.act), all.subspan(L.fc2_w, D * hid), cspan(dx), T, hid,
                             D, dact, gall.subspan(L.fc2_w, D * hid), gall.subspan(L.fc2_b, D));
    dpre.resize(T * hid);
    for (std::size_t i = 0; i < T * hid; ++i) dpre[i] = dact[i] * gelu_grad(c.pre[i]);
    dh2.assign(T * D, 0.0);
    kernels::linear_backward(exec, cspan(c.h2), all.subspan(L.fc1_w, hid * D), cspan(dpre), T, D,
                             hid, dh2, gall.subspan(L.fc1_w, hid * D), gall.subspan(L.fc1_b, hid));
    layer_norm_backward(dh2.data(), T, D, w + L.ln2_w, c.ln2, dmid.data(), g + L.ln2_w,
                        g + L.ln2_b);

    // x_mid = x_in + proj(attention(ln1(x_in)))
    dx = dmid;
    dattn.assign(T * D, 0.0);
    kernels::linear_backward(exec, cspan(c.attn), all.subspan(L.proj_w, D * D), cspan(dmid), T, D,
                             D, dattn, gall.subspan(L.proj_w, D * D), gall.subspan(L.proj_b, D));
    dqkv.assign(T * 3 * D, 0.0);
    dA.resize(T * T);
    dS.resize(T * T);
    for (std::size_t h = 0; h < H; ++h) {
      const double* q = c.qkv.data() + h * dh;
      const double* k = c.qkv.data() + D + h * dh;
      const double* v = c.qkv.data() + 2 * D + h * dh;
      const double* p = c.probs.data() + h * T * T;
      const double* dout = dattn.data() + h * dh;
      kernels::matmul_nt(exec, dout, D, v, 3 * D, T, T, dh, 1.0, dA.data(), T);
      kernels::matmul_tn(exec, p, T, dout, D, T, dh, T, dqkv.data() + 2 * D + h * dh, 3 * D, true);
      for (std::size_t i = 0; i < T; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < T; ++j) row += p[i * T + j] * dA[i * T + j];
        for (std::size_t j = 0; j < T; ++j) {
          dS[i * T + j] = scale * p[i * T + j] * (dA[i * T + j] - row);
        }
      }
      kernels::matmul_nn(exec, dS.data(), T, k, 3 * D, T, dh, T, dqkv.data() + h * dh, 3 * D, true);
      kernels::matmul_tn(exec, dS.data(), T, q, 3 * D, T, dh, T, dqkv.data() + D + h * dh, 3 * D,
                         true);
    }
    dh1.assign(T * D, 0.0);
    kernels::linear_backward(exec, cspan(c.h1), all.subspan(L.qkv_w, 3 * D * D), cspan(dqkv), T, D,
                             3 * D, dh1, gall.subspan(L.qkv_w, 3 * D * D),
                             gall.subspan(L.qkv_b, 3 * D));
    layer_norm_backward(dh1.data(), T, D, w + L.ln1_w, c.ln1, dx.data(), g + L.ln1_w, g + L.ln1_b);
  }

  // Token embeddings: row 0 is the [cls] parameter, the rest are E * patch.
  for (std::size_t i = 0; i < D; ++i) g[layout.cls + i] += dx[i];
  const std::size_t len = cfg.patch_length();
  std::size_t t = 1;
  for (std::size_t gi = 0; gi < input.groups.size(); ++gi) {
    double* de = g + layout.embed[gi];
    for (const auto& patch : input.groups[gi].patches) {
      const double* dtok = dx.data() + t * D;
      for (std::size_t j = 0; j < len; ++j) {
        const double v = patch.values[j];
        if (v == 0.0) continue;
        for (std::size_t r = 0; r < D; ++r) de[r * len + j] += dtok[r] * v;
      }
      ++t;
    }
  }
  return loss;
}

constexpr std::size_t kReductionChunk = 8;

}  // namespace

std::vector<double> forward(const TokenSequence& tokens, const ModelParameters& params, Exec exec) {
  if (tokens.dim != static_cast<std::size_t>(params.config.dim) ||
      tokens.embeddings.size() != tokens.length() * tokens.dim || tokens.length() == 0) {
    throw std::invalid_argument("forward: token sequence does not match the model width");
  }
  Activations act;
  forward_pass(tokens.embeddings, tokens.length(), params, exec, act);
  return act.probs;
}

std::vector<double> predict_proba(const ModelInput& input, const ModelParameters& params, Exec exec) {
  return forward(embed_input(input, params), params, exec);
}

LossAndGradients loss_and_gradients(std::span<const ModelInput> batch, std::span<const int> labels,
                                    const ModelParameters& params, Exec exec) {
  if (batch.size() != labels.size()) throw std::invalid_argument("loss: batch/label size mismatch");
  LossAndGradients out;
  out.grads.assign(params.values.size(), 0.0);
  if (batch.empty()) return out;
  for (int label : labels) {
    if (label < 0 || label >= params.config.num_classes) {
      throw std::invalid_argument("loss: label " + std::to_string(label) + " outside [0, " +
                                  std::to_string(params.config.num_classes) + ")");
    }
  }
  for (const auto& input : batch) {
    if (static_cast<int>(input.groups.size()) != params.config.num_groups()) {
      throw std::invalid_argument("loss: input has the wrong number of token groups");
    }
    for (const auto& g : input.groups) {
      if (g.patch_length() != params.config.patch_length()) {
        throw std::invalid_argument("loss: patch length does not match the model");
      }
    }
  }
  const double weight = 1.0 / static_cast<double>(batch.size());

  if (exec == Exec::serial) {
    std::vector<double> sample_grad(params.values.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      std::fill(sample_grad.begin(), sample_grad.end(), 0.0);
      out.loss += sample_gradient(batch[i], labels[i], params, exec, weight, sample_grad);
      for (std::size_t k = 0; k < sample_grad.size(); ++k) out.grads[k] += sample_grad[k];
    }
    out.loss *= weight;
    return out;
  }

  std::vector<std::vector<double>> grads(std::min(kReductionChunk, batch.size()),
                                         std::vector<double>(params.values.size()));
  std::vector<double> losses(batch.size(), 0.0);
  for (std::size_t start = 0; start < batch.size(); start += kReductionChunk) {
    const std::size_t count = std::min(kReductionChunk, batch.size() - start);
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      auto& buf = grads[static_cast<std::size_t>(i)];
      std::fill(buf.begin(), buf.end(), 0.0);
      const std::size_t s = start + static_cast<std::size_t>(i);
      losses[s] = sample_gradient(batch[s], labels[s], params, Exec::parallel, weight, buf);
    }
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t k = 0; k < out.grads.size(); ++k) out.grads[k] += grads[i][k];
    }
  }
  for (double l : losses) out.loss += l;
  out.loss *= weight;
  return out;
}

double batch_loss(std::span<const ModelInput> batch, std::span<const int> labels,
                  const ModelParameters& params) {
  if (batch.size() != labels.size()) throw std::invalid_argument("loss: batch/label size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto probs = predict_proba(batch[i], params, Exec::serial);
    total += -std::log(probs[labels[i]]);
  }
  return batch.empty() ? 0.0 : total / static_cast<double>(batch.size());
}

}  // namespace xpert
