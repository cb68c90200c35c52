#include "rxprobe/neural/train.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rxprobe/ad/adam.hpp"
#include "rxprobe/ad/ops.hpp"
#include "rxprobe/ad/tape.hpp"
#include "rxprobe/link/rng.hpp"
#include "rxprobe/rx/classic.hpp"

namespace rxprobe::neural {

using ad::Tensor;

void TrainBudget::validate() const {
  if (n_steps == 0) throw std::invalid_argument("train: n_steps must be positive");
  if (batch == 0) throw std::invalid_argument("train: batch must be positive");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("train: lr must be positive");
}

double learning_rate(const TrainBudget& b, std::size_t step) {
  if (b.decay == LrDecay::Constant) return b.lr;
  const double t = static_cast<double>(step) / static_cast<double>(b.n_steps);
  return b.lr * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

Tensor neural_llr(const NeuralReceiver& model, const Tensor& rx, const link::Frame& frame,
                  const link::SignalConfig& config) {
  return neural_llr(model, rx, frame, config, model.params());
}

Tensor neural_llr(const NeuralReceiver& model, const Tensor& rx, const link::Frame& frame,
                  const link::SignalConfig& config, const std::vector<Tensor>& params) {
  const Tensor h_ls = rx::ls_estimate(rx, frame.pilots.values, frame.pilot_mask, config.n_symbols,
                                      config.n_subcarriers());
  return model.forward(make_features(rx, frame.pilots.values, h_ls), params);
}

namespace {

link::ScenarioTensors per_item(const std::vector<link::ScenarioParams>& items) {
  std::vector<double> s, d, n;
  for (const auto& p : items) {
    s.push_back(p.speed_mps);
    d.push_back(p.delay_spread_ns);
    n.push_back(p.noise_dbm);
  }
  const ad::Shape shape{items.size()};
  return {Tensor::real(shape, s), Tensor::real(shape, d), Tensor::real(shape, n)};
}

}  // namespace

TrainResult train(NeuralReceiver& model, const TrainPreset& preset, const TrainBudget& budget,
                  const link::SignalConfig& base, const TrainProgress& progress) {
  budget.validate();
  const std::size_t bits_out = model.config().bits_out;
  for (auto m : preset.modulations)
    if (link::bits_per_symbol(m) > bits_out) {
      throw std::invalid_argument("train: preset " + preset.name + " uses " + link::to_string(m) +
                                  " but the model only has " + std::to_string(bits_out) + " output planes");
    }

  const auto start = std::chrono::steady_clock::now();
  ad::AdamState adam(ad::AdamConfig{budget.lr});
  TrainResult result;
  result.loss_history.reserve(budget.n_steps);

  for (std::size_t step = 0; step < budget.n_steps; ++step) {
    const BatchDraw draw = draw_batch(preset, budget.seed, step, budget.batch);
    link::SignalConfig cfg = base;
    cfg.modulation = draw.modulation;
    const auto batch = link::simulate_batch(link::derive_seed(budget.seed, link::Stream::Training, step), cfg,
                                            link::default_profile(draw.profile), per_item(draw.items), budget.batch);
    const auto targets = rx::BitTargets::from_frame(batch.frame, bits_out);

    ad::Tape tape;
    std::vector<Tensor> watched;
    watched.reserve(model.params().size());
    for (const auto& p : model.params()) watched.push_back(tape.watch(p));
    const Tensor loss = rx::bce_loss(neural_llr(model, batch.channel.rx.values, batch.frame, cfg, watched), targets);
    const double value = loss.item();

    const double lr = learning_rate(budget, step);
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "training diverged at step " << step << ": loss " << value << " (lr " << lr << ", modulation "
          << link::to_string(draw.modulation) << ", profile " << draw.profile << ")";
      throw TrainingDiverged(msg.str());
    }
    const auto grads = tape.backward(loss);
    std::vector<Tensor> g;
    g.reserve(watched.size());
    for (const auto& w : watched) g.push_back(grads.wrt(w));
    adam.config.lr = lr;
    try {
      ad::adam_step(adam, model.mutable_params(), g);
    } catch (const ad::NonFiniteGradient& e) {
      throw TrainingDiverged("training diverged at step " + std::to_string(step) + ": " + e.what());
    }
    result.loss_history.push_back(value);
    if (progress) progress(step, value, lr);
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

BerComparison compare_ber(const NeuralReceiver& model, const link::SignalConfig& config,
                          const link::ChannelProfile& profile, const std::vector<link::ScenarioParams>& scenarios,
                          std::size_t batch, std::uint64_t seed) {
  BerComparison out;
  double neural_err = 0.0, classic_err = 0.0;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto sim = link::simulate_batch(link::derive_seed(seed, link::Stream::Benchmark, i), config, profile,
                                          link::ScenarioTensors::constant(scenarios[i]), batch);
    const auto classic = rx::classic_receiver(sim.channel.rx.values, sim.frame, sim.channel.noise_var, config);
    const auto t_classic = rx::BitTargets::from_frame(sim.frame, link::bits_per_symbol(config.modulation));
    const auto t_neural = rx::BitTargets::from_frame(sim.frame, model.config().bits_out);
    const Tensor llr = model.forward(make_features(sim.channel.rx.values, sim.frame.pilots.values, classic.h_ls));
    const auto n = static_cast<double>(t_neural.n_bits);
    neural_err += rx::hard_ber(llr, t_neural) * n;
    classic_err += rx::hard_ber(classic.llr, t_classic) * n;
    out.n_bits += t_neural.n_bits;
  }
  if (out.n_bits > 0) {
    out.neural = neural_err / static_cast<double>(out.n_bits);
    out.classic = classic_err / static_cast<double>(out.n_bits);
  }
  return out;
}

std::vector<link::ScenarioParams> benchmark_scenarios(const TrainPreset& preset, std::size_t count,
                                                      std::uint64_t seed) {
  const link::CounterRng rng(link::derive_seed(seed, link::Stream::Benchmark));
  const link::Modulation m = preset.test_modulation();
  std::vector<link::ScenarioParams> out;
  for (std::size_t i = 0; i < count; ++i) {
    link::ScenarioParams p;
    p.speed_mps = preset.speed_mps.sample(rng.uniform(i, 0));
    p.delay_spread_ns = preset.delay_spread_ns.sample(rng.uniform(i, 1));
    p.noise_dbm = -link::ebn0_to_snr_db(preset.ebn0_db.max(), m);
    out.push_back(p);
  }
  return out;
}

}  // namespace rxprobe::neural
