#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rxprobe/ad/tensor.hpp"
#include "rxprobe/link/channel.hpp"
#include "rxprobe/neural/model.hpp"
#include "rxprobe/neural/presets.hpp"

namespace rxprobe::neural {

enum class LrDecay { Cosine, Constant };

struct TrainBudget {
  std::size_t n_steps = 20000;
  std::size_t batch = 32;
  double lr = 1e-3;
  LrDecay decay = LrDecay::Cosine;
  std::uint64_t seed = 1;

  void validate() const;
};

// lr * (1 + cos(pi * step / n_steps)) / 2 for cosine decay.
double learning_rate(const TrainBudget& budget, std::size_t step);

struct TrainResult {
  std::vector<double> loss_history;  // one BCE value per step
  double seconds = 0.0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TrainProgress = std::function<void(std::size_t step, double loss, double lr)>;

// Adam on the mean BCE over data bits. Each step simulates a fresh batch drawn
// by draw_batch(preset, budget.seed, step). Throws TrainingDiverged on a
// non-finite loss or gradient, leaving the weights of the last good step.
TrainResult train(NeuralReceiver& model, const TrainPreset& preset, const TrainBudget& budget,
                  const link::SignalConfig& base = {}, const TrainProgress& progress = {});

// LS estimate -> features -> network, evaluated with `params` (defaults to
// the model's own weights).
ad::Tensor neural_llr(const NeuralReceiver& model, const ad::Tensor& rx, const link::Frame& frame,
                      const link::SignalConfig& config);
ad::Tensor neural_llr(const NeuralReceiver& model, const ad::Tensor& rx, const link::Frame& frame,
                      const link::SignalConfig& config, const std::vector<ad::Tensor>& params);

struct BerComparison {
  double neural = 0.0;
  double classic = 0.0;
  std::size_t n_bits = 0;
};

// Hard BER of both receivers on identical batches, one batch per scenario.
BerComparison compare_ber(const NeuralReceiver& model, const link::SignalConfig& config,
                          const link::ChannelProfile& profile, const std::vector<link::ScenarioParams>& scenarios,
                          std::size_t batch, std::uint64_t seed);

// Held-out in-distribution scenarios: the preset's highest Eb/N0 with speed
// and delay spread drawn from the preset's samplers.
std::vector<link::ScenarioParams> benchmark_scenarios(const TrainPreset& preset, std::size_t count,
                                                      std::uint64_t seed);

}  // namespace rxprobe::neural
