#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "rxprobe/ad/tensor.hpp"
#include "rxprobe/link/grid.hpp"
#include "rxprobe/link/profiles.hpp"
#include "rxprobe/link/signal.hpp"

namespace rxprobe::link {

// Every random draw of one channel batch. Nothing here depends on the
// scenario parameters; those only enter in apply_channel.
struct ChannelRealization {
  std::uint64_t seed = 0;
  std::size_t batch = 0;
  std::size_t n_taps = 0;
  std::size_t n_sinusoids = 0;
  std::size_t n_symbols = 0;
  std::size_t n_subcarriers = 0;
  bool los = false;

  // (batch, tap, sinusoid): unit-variance complex weights and cos(angle of arrival).
  std::vector<std::complex<double>> weights;
  std::vector<double> cos_angles;
  // (batch): specular component arrival cosine and initial phase.
  std::vector<double> los_cos_angle;
  std::vector<double> los_phase;
  // (batch, symbol, subcarrier): unit-variance complex noise.
  std::vector<std::complex<double>> noise;
};

ChannelRealization sample_realization(std::uint64_t seed, std::size_t batch, const ChannelProfile& profile,
                                      const SignalConfig& config, std::size_t n_sinusoids = 16);

// Physical validity limits enforced by apply_channel. The search space is
// narrower and clamps before calling.
struct ChannelLimits {
  static constexpr double kMaxSpeed = 500.0;     // m/s
  static constexpr double kMaxDelay = 10'000.0;  // ns
  static constexpr double kMinNoise = -150.0;    // dBm
  static constexpr double kMaxNoise = 60.0;      // dBm
};

// Scenario leaves as differentiable real tensors; each is a scalar (shape {}
// or {1}) or one value per batch item (shape {batch}).
struct ScenarioTensors {
  ad::Tensor speed;
  ad::Tensor delay_spread;
  ad::Tensor noise_dbm;

  static ScenarioTensors constant(const ScenarioParams& p);
};

struct ChannelOutput {
  ResourceGrid rx;  // S_r
  ResourceGrid h;   // true channel
  // sigma^2 per batch item, shape (batch, 1, 1), broadcastable against grids.
  ad::Tensor noise_var;
};

// H(t,f) = sum_p sqrt(P_p) g_p(t) exp(-j 2 pi f_sc(f) x_d tau_p), with
// g_p(t) a sum of sinusoids at Doppler x_s f_c / c, and
// S_r = H * tx + 10^(x_n / 20) * noise.
ChannelOutput apply_channel(const ResourceGrid& tx, const ChannelRealization& real, const ScenarioTensors& params,
                            const ChannelProfile& profile, const SignalConfig& config);
ChannelOutput apply_channel(const ResourceGrid& tx, const ChannelRealization& real, const ScenarioParams& params,
                            const ChannelProfile& profile, const SignalConfig& config);

// Payload, channel draws and channel output of one batch; the frame and
// the realization are both keyed by `seed`.
struct LinkBatch {
  Frame frame;
  ChannelRealization realization;
  ChannelOutput channel;
};

LinkBatch simulate_batch(std::uint64_t seed, const SignalConfig& config, const ChannelProfile& profile,
                         const ScenarioTensors& params, std::size_t batch);

// Checks the physical limits; throws std::invalid_argument naming the field.
void check_scenario(const ScenarioParams& p);

}  // namespace rxprobe::link
