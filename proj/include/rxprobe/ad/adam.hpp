#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rxprobe/ad/tensor.hpp"

namespace rxprobe::ad {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moments are zero until the first step. `lr` may be changed between steps.
struct AdamState {
  AdamConfig config;
  std::int64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;

  AdamState() = default;
  explicit AdamState(AdamConfig cfg) : config(cfg) {}
};

class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One bias-corrected Adam update of `params` in place. Throws
// NonFiniteGradient, leaving params and state untouched, if any gradient
// entry is NaN or infinite.
void adam_step(AdamState& state, std::vector<Tensor>& params, const std::vector<Tensor>& grads);

}  // namespace rxprobe::ad
