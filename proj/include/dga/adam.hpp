#pragma once

#include <cstdint>
#include <vector>

#include "dga/params.hpp"

namespace dga {

// Bias-corrected Adam. Moments are laid out parallel to the registry.
struct AdamState {
  real lr = real(1e-4);
  real beta1 = real(0.9);
  real beta2 = real(0.999);
  real eps = real(1e-8);
  std::uint64_t step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;

  static AdamState create(const ModelParams& params, real lr);
};

// One update over every parameter, then zeroes the gradients. Throws
// DivergenceError naming the parameter if any gradient entry is non-finite.
void adam_step(ModelParams& params, AdamState& state);

}  // namespace dga
