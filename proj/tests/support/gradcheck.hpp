#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "xpert/model.hpp"

namespace xpert::testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

// Below this magnitude both gradients are treated as zero-ish and compared
// absolutely; central differences at h = 1e-5 carry ~1e-11 of roundoff.
inline constexpr double kGradCheckFloor = 1e-6;

inline GradCheckResult grad_check(std::span<const ModelInput> batch, std::span<const int> labels,
                                  ModelParameters params, double h = 1e-5) {
  const auto analytic = loss_and_gradients(batch, labels, params, kernels::Exec::serial).grads;
  GradCheckResult r;
  for (std::size_t i = 0; i < params.values.size(); ++i) {
    const double saved = params.values[i];
    params.values[i] = saved + h;
    const double up = batch_loss(batch, labels, params);
    params.values[i] = saved - h;
    const double down = batch_loss(batch, labels, params);
    params.values[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), kGradCheckFloor});
    const double rel = std::abs(analytic[i] - numeric) / denom;
    if (rel > r.max_rel_error) {
      r.max_rel_error = rel;
      r.worst_index = i;
    }
    ++r.checked;
  }
  return r;
}

}  // namespace xpert::testing
