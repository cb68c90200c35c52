#include "rxprobe/search/evaluator.hpp"

#include <cmath>
#include <stdexcept>

#include "rxprobe/ad/ops.hpp"
#include "rxprobe/ad/tape.hpp"
#include "rxprobe/link/rng.hpp"

namespace rxprobe::search {

using ad::Tensor;

double compute_loss(double soft_ber_t, double soft_ber_ai) { return soft_ber_t - soft_ber_ai; }

Tensor compute_loss(const Tensor& soft_ber_t, const Tensor& soft_ber_ai) { return ad::sub(soft_ber_t, soft_ber_ai); }

bool failure_criterion(double hard_ber_t, double hard_ber_ai, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("failure threshold must be positive");
  if (!(hard_ber_ai > 0.0)) return false;
  return hard_ber_t / hard_ber_ai <= threshold;
}

namespace {

struct Outputs {
  Tensor soft_t, soft_ai, loss;
  double hard_t = 0.0, hard_ai = 0.0;
  std::size_t n_bits = 0;
};

Outputs pipeline(const neural::NeuralReceiver& model, const link::SignalConfig& cfg,
                 const link::ChannelProfile& profile, rx::Demapper demapper, const link::ScenarioTensors& params,
                 std::uint64_t seed, std::size_t batch) {
  const auto sim = link::simulate_batch(seed, cfg, profile, params, batch);
  const Tensor& rx_grid = sim.channel.rx.values;
  const auto classic = rx::classic_receiver(rx_grid, sim.frame, sim.channel.noise_var, cfg, demapper);
  const Tensor llr_ai = model.forward(neural::make_features(rx_grid, sim.frame.pilots.values, classic.h_ls));

  const auto t_classic = rx::BitTargets::from_frame(sim.frame, link::bits_per_symbol(cfg.modulation));
  const auto t_neural = rx::BitTargets::from_frame(sim.frame, model.config().bits_out);
  Outputs o;
  o.soft_t = rx::soft_ber(classic.llr, t_classic);
  o.soft_ai = rx::soft_ber(llr_ai, t_neural);
  o.loss = compute_loss(o.soft_t, o.soft_ai);
  o.hard_t = rx::hard_ber(classic.llr, t_classic);
  o.hard_ai = rx::hard_ber(llr_ai, t_neural);
  o.n_bits = t_classic.n_bits;
  return o;
}

}  // namespace

Evaluator::Evaluator(const neural::NeuralReceiver& model, const link::SignalConfig& config,
                     const link::ChannelProfile& profile, rx::Demapper demapper)
    : model_(model), config_(config), profile_(profile), demapper_(demapper) {
  if (link::bits_per_symbol(config_.modulation) > model_.config().bits_out) {
    throw std::invalid_argument("evaluator: " + link::to_string(config_.modulation) + " needs more LLR planes than the model's " +
                                std::to_string(model_.config().bits_out));
  }
}

Evaluation Evaluator::evaluate(const SearchSpace& space, const std::array<double, kAxes>& x_hat, std::uint64_t seed,
                               std::size_t batch, bool with_grad) const {
  ad::Tape tape;
  const Tensor x0 = Tensor::real({kAxes}, std::vector<double>(x_hat.begin(), x_hat.end()));
  const Tensor leaf = with_grad ? tape.watch(x0) : x0;
  std::array<Tensor, kAxes> canonical;
  for (std::size_t i = 0; i < kAxes; ++i) {
    const auto& a = space.axes[i];
    canonical[i] = a.to_canonical(denormalize(ad::slice(leaf, 0, i, i + 1), a.min, a.max));
  }
  const Outputs o =
      pipeline(model_, config_, profile_, demapper_, {canonical[0], canonical[1], canonical[2]}, seed, batch);

  Evaluation e;
  e.hard_ber_t = o.hard_t;
  e.hard_ber_ai = o.hard_ai;
  e.soft_ber_t = o.soft_t.item();
  e.soft_ber_ai = o.soft_ai.item();
  e.loss = o.loss.item();
  e.n_bits = o.n_bits;
  if (with_grad) {
    const Tensor g = tape.backward(o.loss).wrt(leaf);
    for (std::size_t i = 0; i < kAxes; ++i) e.grad[i] = g.data()[i];
  }
  return e;
}

Evaluation Evaluator::evaluate_hard(const link::ScenarioParams& params, std::uint64_t seed,
                                    std::size_t n_realizations, std::size_t chunk) const {
  if (n_realizations == 0 || chunk == 0) throw std::invalid_argument("evaluate_hard: need at least one realization");
  const auto tensors = link::ScenarioTensors::constant(params);
  Evaluation e;
  double err_t = 0.0, err_ai = 0.0, soft_t = 0.0, soft_ai = 0.0;
  std::size_t done = 0;
  for (std::uint64_t k = 0; done < n_realizations; ++k) {
    const std::size_t b = std::min(chunk, n_realizations - done);
    const Outputs o =
        pipeline(model_, config_, profile_, demapper_, tensors, link::derive_seed(seed, link::Stream::Validation, k), b);
    const auto n = static_cast<double>(o.n_bits);
    err_t += o.hard_t * n;
    err_ai += o.hard_ai * n;
    soft_t += o.soft_t.item() * n;
    soft_ai += o.soft_ai.item() * n;
    e.n_bits += o.n_bits;
    done += b;
  }
  const auto n = static_cast<double>(e.n_bits);
  e.hard_ber_t = err_t / n;
  e.hard_ber_ai = err_ai / n;
  e.soft_ber_t = soft_t / n;
  e.soft_ber_ai = soft_ai / n;
  e.loss = compute_loss(e.soft_ber_t, e.soft_ber_ai);
  return e;
}

}  // namespace rxprobe::search
