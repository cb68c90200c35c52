#pragma once

#include <array>
#include <cstdint>

#include "rxprobe/ad/tensor.hpp"
#include "rxprobe/link/channel.hpp"
#include "rxprobe/neural/model.hpp"
#include "rxprobe/rx/classic.hpp"
#include "rxprobe/search/space.hpp"

namespace rxprobe::search {

// L = BER_t - BER_AI on soft BERs; minimizing it pushes the AI receiver to
// fail relative to the classical one.
double compute_loss(double soft_ber_t, double soft_ber_ai);
ad::Tensor compute_loss(const ad::Tensor& soft_ber_t, const ad::Tensor& soft_ber_ai);

// BER_t / BER_AI <= T on hard BERs. A perfect AI receiver (BER_AI = 0) is
// never a failure. Shared by the search, the grid and validation.
bool failure_criterion(double hard_ber_t, double hard_ber_ai, double threshold);

struct Evaluation {
  double hard_ber_t = 0.0;
  double hard_ber_ai = 0.0;
  double soft_ber_t = 0.0;
  double soft_ber_ai = 0.0;
  double loss = 0.0;
  std::array<double, kAxes> grad{};  // dL/dx_hat, zero unless requested
  std::size_t n_bits = 0;
};

// Dual-receiver pipeline: one simulated batch feeds the classical chain and
// the neural receiver; both BERs are computed on the same bits.
class Evaluator {
 public:
  Evaluator(const neural::NeuralReceiver& model, const link::SignalConfig& config, const link::ChannelProfile& profile,
            rx::Demapper demapper = rx::Demapper::MaxLog);

  // Evaluates at normalized point x_hat with `batch` realizations keyed by
  // `seed`. With `with_grad`, backpropagates L to the three leaves.
  Evaluation evaluate(const SearchSpace& space, const std::array<double, kAxes>& x_hat, std::uint64_t seed,
                      std::size_t batch, bool with_grad) const;

  // Hard BERs only, at canonical parameters, over n_realizations split into
  // chunks of at most `chunk` items with seeds derive_seed(seed, Validation, k).
  Evaluation evaluate_hard(const link::ScenarioParams& params, std::uint64_t seed, std::size_t n_realizations,
                           std::size_t chunk = 25) const;

  const link::SignalConfig& config() const { return config_; }

 private:
  Evaluation run(const link::ScenarioTensors& params, std::uint64_t seed, std::size_t batch) const;

  const neural::NeuralReceiver& model_;
  link::SignalConfig config_;
  link::ChannelProfile profile_;
  rx::Demapper demapper_;
};

}  // namespace rxprobe::search
