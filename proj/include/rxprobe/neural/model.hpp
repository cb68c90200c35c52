#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rxprobe/ad/tensor.hpp"

namespace rxprobe::neural {

constexpr std::size_t kInputPlanes = 6;

struct ModelConfig {
  std::size_t n_resblocks = 5;
  std::size_t channel_width = 24;
  std::size_t bits_out = 4;
  std::uint64_t init_seed = 1;

  void validate() const;
  // Closed-form parameter count for this architecture.
  std::size_t parameter_count() const;
  bool operator==(const ModelConfig&) const = default;
};

// Fully convolutional residual receiver on the (symbol, subcarrier) grid:
//   h = conv_in(x)
//   h = h + conv_b2(relu(conv_b1(relu(h))))   for each block
//   llr = conv_out(relu(h))
// All convolutions are 3x3 with same padding, so the grid shape is kept.
class NeuralReceiver {
 public:
  explicit NeuralReceiver(const ModelConfig& config);
  NeuralReceiver(const ModelConfig& config, std::vector<ad::Tensor> params);

  const ModelConfig& config() const { return config_; }
  const std::vector<ad::Tensor>& params() const { return params_; }
  std::vector<ad::Tensor>& mutable_params() { return params_; }
  std::size_t parameter_count() const;
  // Names in parameter order, e.g. "block3.conv1.weight".
  std::vector<std::string> param_names() const;
  // Expected shape of each parameter.
  static std::vector<ad::Shape> param_shapes(const ModelConfig& config);

  // features: real (batch, n_symbols, n_subcarriers, 6) -> LLRs (..., bits_out).
  ad::Tensor forward(const ad::Tensor& features) const;
  // Same network evaluated with `params` (e.g. copies watched on a tape).
  ad::Tensor forward(const ad::Tensor& features, const std::vector<ad::Tensor>& params) const;

 private:
  ModelConfig config_;
  std::vector<ad::Tensor> params_;
};

// Six real planes per RE: Re/Im of S_r, S_p and H_r, each scaled by sqrt(2)
// so that a unit-power complex value gives unit-variance planes.
ad::Tensor make_features(const ad::Tensor& rx, const ad::Tensor& pilots, const ad::Tensor& h_ls);

}  // namespace rxprobe::neural
