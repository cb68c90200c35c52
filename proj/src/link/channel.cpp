#include "rxprobe/link/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rxprobe/ad/ops.hpp"
#include "rxprobe/link/rng.hpp"

namespace rxprobe::link {

using ad::Tensor;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_range(const char* field, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi)) {
    throw std::invalid_argument(std::string("apply_channel: ") + field + " = " + std::to_string(v) +
                                " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

// Reshapes a scalar or per-item parameter to (n, 1, ..., 1) with `rank` dims.
Tensor param_view(const Tensor& p, std::size_t batch, std::size_t rank, const char* field) {
  if (p.is_complex()) throw std::invalid_argument(std::string("apply_channel: ") + field + " must be real");
  const std::size_t n = p.numel();
  if (n != 1 && n != batch) {
    throw std::invalid_argument(std::string("apply_channel: ") + field + " has shape " + ad::shape_str(p.shape()) +
                                ", expected a scalar or (" + std::to_string(batch) + ")");
  }
  ad::Shape s(rank, 1);
  s[0] = n;
  return ad::reshape(p, s);
}

}  // namespace

ScenarioTensors ScenarioTensors::constant(const ScenarioParams& p) {
  return {Tensor::scalar(p.speed_mps), Tensor::scalar(p.delay_spread_ns), Tensor::scalar(p.noise_dbm)};
}

void check_scenario(const ScenarioParams& p) {
  check_range("speed", p.speed_mps, 0.0, ChannelLimits::kMaxSpeed);
  check_range("delay_spread", p.delay_spread_ns, 0.0, ChannelLimits::kMaxDelay);
  check_range("noise_dbm", p.noise_dbm, ChannelLimits::kMinNoise, ChannelLimits::kMaxNoise);
}

ChannelRealization sample_realization(std::uint64_t seed, std::size_t batch, const ChannelProfile& profile,
                                      const SignalConfig& config, std::size_t n_sinusoids) {
  if (n_sinusoids < 8) throw std::invalid_argument("sample_realization: n_sinusoids must be >= 8");
  if (batch == 0) throw std::invalid_argument("sample_realization: batch must be >= 1");
  profile.validate();
  ChannelRealization r;
  r.seed = seed;
  r.batch = batch;
  r.n_taps = profile.n_taps();
  r.n_sinusoids = n_sinusoids;
  r.n_symbols = config.n_symbols;
  r.n_subcarriers = config.n_subcarriers();
  r.los = profile.los;

  const CounterRng gain(derive_seed(seed, Stream::TapGain));
  const CounterRng angle(derive_seed(seed, Stream::TapAngle));
  const CounterRng los_angle(derive_seed(seed, Stream::LosAngle));
  const CounterRng los_phase(derive_seed(seed, Stream::LosPhase));
  const CounterRng noise(derive_seed(seed, Stream::Noise));

  const std::size_t pm = r.n_taps * n_sinusoids;
  r.weights.resize(batch * pm);
  r.cos_angles.resize(batch * pm);
  r.los_cos_angle.resize(batch);
  r.los_phase.resize(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t p = 0; p < r.n_taps; ++p)
      for (std::size_t m = 0; m < n_sinusoids; ++m) {
        const std::size_t i = (b * r.n_taps + p) * n_sinusoids + m;
        r.weights[i] = gain.complex_normal(b, p, m);
        r.cos_angles[i] = std::cos(kTwoPi * angle.uniform(b, p, m));
      }
    r.los_cos_angle[b] = std::cos(kTwoPi * los_angle.uniform(b));
    r.los_phase[b] = kTwoPi * los_phase.uniform(b);
  }
  const std::size_t res = r.n_symbols * r.n_subcarriers;
  r.noise.resize(batch * res);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t i = 0; i < res; ++i) r.noise[b * res + i] = noise.complex_normal(b, i);
  return r;
}

ChannelOutput apply_channel(const ResourceGrid& tx, const ChannelRealization& real, const ScenarioTensors& params,
                            const ChannelProfile& profile, const SignalConfig& config) {
  const std::size_t nb = real.batch, nt = real.n_symbols, nf = real.n_subcarriers;
  const std::size_t np = real.n_taps, nm = real.n_sinusoids;
  if (tx.values.shape() != ad::Shape{nb, nt, nf} || !tx.values.is_complex()) {
    throw std::invalid_argument("apply_channel: tx grid " + ad::shape_str(tx.values.shape()) +
                                " does not match realization (" + std::to_string(nb) + ", " + std::to_string(nt) +
                                ", " + std::to_string(nf) + ")");
  }
  if (profile.n_taps() != np || profile.los != real.los) {
    throw std::invalid_argument("apply_channel: realization was drawn for a different profile than " + profile.name);
  }
  if (config.n_symbols != nt || config.n_subcarriers() != nf) {
    throw std::invalid_argument("apply_channel: signal config does not match realization");
  }
  for (double v : params.speed.data()) check_range("speed", v, 0.0, ChannelLimits::kMaxSpeed);
  for (double v : params.delay_spread.data()) check_range("delay_spread", v, 0.0, ChannelLimits::kMaxDelay);
  for (double v : params.noise_dbm.data())
    check_range("noise_dbm", v, ChannelLimits::kMinNoise, ChannelLimits::kMaxNoise);

  const double t_sym = config.symbol_duration_s();
  const double doppler_per_mps = config.carrier_frequency_hz / kSpeedOfLight;
  const double k_lin = profile.los ? profile.k_factor_linear() : 0.0;

  // Doppler phase per unit speed, (batch, symbol, tap, sinusoid).
  std::vector<double> doppler(nb * nt * np * nm);
  std::vector<double> weights(2 * nb * np * nm);
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < nt; ++t)
      for (std::size_t p = 0; p < np; ++p)
        for (std::size_t m = 0; m < nm; ++m)
          doppler[((b * nt + t) * np + p) * nm + m] = kTwoPi * doppler_per_mps * real.cos_angles[(b * np + p) * nm + m] *
                                                      static_cast<double>(t) * t_sym;
    for (std::size_t p = 0; p < np; ++p) {
      double power = profile.powers[p];
      if (p == 0 && profile.los) power /= (k_lin + 1.0);
      const double amp = std::sqrt(power / static_cast<double>(nm));
      for (std::size_t m = 0; m < nm; ++m) {
        const std::size_t i = (b * np + p) * nm + m;
        weights[2 * i] = amp * real.weights[i].real();
        weights[2 * i + 1] = amp * real.weights[i].imag();
      }
    }
  }
  const Tensor speed4 = param_view(params.speed, nb, 4, "speed");
  const Tensor phase = ad::mul(Tensor::real({nb, nt, np, nm}, std::move(doppler)), speed4);
  const Tensor w = Tensor::complex({nb, 1, np, nm}, std::move(weights));
  const Tensor taps = ad::sum_axis(ad::mul(ad::expj(phase), w), 3);  // (batch, symbol, tap)

  // Delay phase ramp per ns of delay spread, (tap, subcarrier).
  std::vector<double> ramp(np * nf);
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t f = 0; f < nf; ++f) {
      const double f_sc = (static_cast<double>(f) - 0.5 * static_cast<double>(nf - 1)) * config.subcarrier_spacing_hz;
      ramp[p * nf + f] = -kTwoPi * f_sc * profile.delays[p] * 1e-9;
    }
  const Tensor delay3 = param_view(params.delay_spread, nb, 3, "delay_spread");
  Tensor steer = ad::expj(ad::mul(Tensor::real({1, np, nf}, std::move(ramp)), delay3));
  if (steer.dim(0) == 1) steer = ad::reshape(steer, {np, nf});
  Tensor h = ad::matmul(taps, steer);  // (batch, symbol, subcarrier)

  if (profile.los) {
    std::vector<double> los_dop(nb * nt), los_phi(nb * nt);
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t t = 0; t < nt; ++t) {
        los_dop[b * nt + t] = kTwoPi * doppler_per_mps * real.los_cos_angle[b] * static_cast<double>(t) * t_sym;
        los_phi[b * nt + t] = real.los_phase[b];
      }
    const Tensor speed3 = param_view(params.speed, nb, 3, "speed");
    const Tensor arg = ad::add(ad::mul(Tensor::real({nb, nt, 1}, std::move(los_dop)), speed3),
                               Tensor::real({nb, nt, 1}, std::move(los_phi)));
    const double amp = std::sqrt(profile.powers[0] * k_lin / (k_lin + 1.0));
    h = ad::add(h, ad::scale(ad::expj(arg), amp));
  }

  const Tensor noise_db = param_view(params.noise_dbm, nb, 3, "noise_dbm");
  const Tensor sigma = ad::exp(ad::scale(noise_db, std::log(10.0) / 20.0));
  Tensor noise_var = ad::exp(ad::scale(noise_db, std::log(10.0) / 10.0));
  if (noise_var.dim(0) != nb) noise_var = ad::mul(noise_var, Tensor::full({nb, 1, 1}, 1.0));
  const Tensor noise = Tensor::complex({nb, nt, nf}, real.noise);
  const Tensor rx = ad::add(ad::mul(h, tx.values), ad::mul(noise, sigma));
  return {{rx, GridRole::Rx}, {h, GridRole::ChannelEstimate}, noise_var};
}

ChannelOutput apply_channel(const ResourceGrid& tx, const ChannelRealization& real, const ScenarioParams& params,
                            const ChannelProfile& profile, const SignalConfig& config) {
  return apply_channel(tx, real, ScenarioTensors::constant(params), profile, config);
}

LinkBatch simulate_batch(std::uint64_t seed, const SignalConfig& config, const ChannelProfile& profile,
                         const ScenarioTensors& params, std::size_t batch) {
  LinkBatch out{make_frame(seed, config, batch), sample_realization(seed, batch, profile, config), {}};
  out.channel = apply_channel(out.frame.tx, out.realization, params, profile, config);
  return out;
}

}  // namespace rxprobe::link
