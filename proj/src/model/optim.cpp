#include "xpert/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace xpert {

void adamw_step(std::span<double> params, std::span<const double> grads, AdamWState& state,
                const AdamWOptions& opt) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument("adamw: parameter, gradient and state sizes differ");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] -= opt.lr * opt.weight_decay * params[i];
    state.m[i] = opt.beta1 * state.m[i] + (1.0 - opt.beta1) * grads[i];
    state.v[i] = opt.beta2 * state.v[i] + (1.0 - opt.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
  }
}

double lr_schedule(std::size_t step, std::size_t total_steps, std::size_t warmup_steps,
                   double base_lr) {
  if (step > total_steps) throw std::invalid_argument("lr_schedule: step beyond total_steps");
  if (step < warmup_steps) {
    return base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
  }
  if (total_steps <= warmup_steps) return base_lr;
  const double progress = static_cast<double>(step - warmup_steps) /
                          static_cast<double>(total_steps - warmup_steps);
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace xpert
