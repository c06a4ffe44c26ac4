#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace xpert {

struct AdamWState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  explicit AdamWState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

struct AdamWOptions {
  double lr = 1e-3;
  double weight_decay = 5e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Decoupled weight decay p -= lr * wd * p, then the bias-corrected Adam
/// update. Throws std::invalid_argument on size mismatch.
void adamw_step(std::span<double> params, std::span<const double> grads, AdamWState& state,
                const AdamWOptions& opt);

/// Linear warmup from 0 to base_lr over warmup_steps, cosine decay to 0 at
/// total_steps.
double lr_schedule(std::size_t step, std::size_t total_steps, std::size_t warmup_steps,
                   double base_lr);

}  // namespace xpert
