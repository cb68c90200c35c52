#include "rxprobe/link/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include "rxprobe/link/modulation.hpp"
#include "rxprobe/link/rng.hpp"

namespace rxprobe::link {
namespace {

constexpr std::uint64_t kPilotSeed = 0x5049'4C4F'5453'4551ULL;

}  // namespace

std::vector<std::uint8_t> generate_payload(std::uint64_t seed, const SignalConfig& config, std::size_t batch) {
  if (batch == 0) throw std::invalid_argument("generate_payload: batch must be >= 1");
  const std::size_t nb = bits_per_symbol(config.modulation);
  const std::size_t per_item = config.data_res_per_item() * nb;
  const CounterRng rng(derive_seed(seed, Stream::Payload));
  std::vector<std::uint8_t> bits(batch * per_item);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t i = 0; i < per_item; ++i) bits[b * per_item + i] = static_cast<std::uint8_t>(rng.bits(b, i) >> 63);
  return bits;
}

const std::vector<std::complex<double>>& pilot_sequence(const SignalConfig& config) {
  static std::mutex mu;
  static std::map<std::size_t, std::vector<std::complex<double>>> cache;
  const std::size_t n = config.pilot_symbols.size() * config.n_subcarriers();
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const CounterRng rng(derive_seed(kPilotSeed, Stream::Pilot));
  std::vector<std::uint8_t> bits(2 * n);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = static_cast<std::uint8_t>(rng.bits(i) >> 63);
  return cache.emplace(n, map_symbols(bits, Modulation::QPSK)).first->second;
}

std::vector<std::uint8_t> pilot_mask(const SignalConfig& config) {
  const std::size_t nf = config.n_subcarriers();
  std::vector<std::uint8_t> mask(config.n_symbols * nf, 0);
  for (std::size_t t : config.pilot_symbols)
    for (std::size_t f = 0; f < nf; ++f) mask[t * nf + f] = 1;
  return mask;
}

Frame build_grid(const std::vector<std::complex<double>>& symbols, const std::vector<std::uint8_t>& payload,
                 const SignalConfig& config, std::size_t batch) {
  config.validate();
  const std::size_t nt = config.n_symbols, nf = config.n_subcarriers();
  const std::size_t nb = bits_per_symbol(config.modulation);
  const std::size_t per_item = config.data_res_per_item();
  if (symbols.size() != batch * per_item) {
    throw std::invalid_argument("build_grid: expected " + std::to_string(batch * per_item) + " data symbols, got " +
                                std::to_string(symbols.size()));
  }
  if (payload.size() != symbols.size() * nb) throw std::invalid_argument("build_grid: payload length mismatch");

  const auto& pilots = pilot_sequence(config);
  Frame fr;
  fr.bits_per_symbol = nb;
  fr.pilot_mask = pilot_mask(config);
  fr.bits.assign(batch * nt * nf * nb, 0);
  std::vector<std::complex<double>> tx(batch * nt * nf), sp(batch * nt * nf);
  for (std::size_t b = 0; b < batch; ++b) {
    std::size_t data_i = 0, pilot_i = 0;
    for (std::size_t t = 0; t < nt; ++t) {
      const bool is_pilot = config.is_pilot_symbol(t);
      for (std::size_t f = 0; f < nf; ++f) {
        const std::size_t re = (b * nt + t) * nf + f;
        if (is_pilot) {
          tx[re] = sp[re] = pilots[pilot_i++];
        } else {
          const std::size_t src = b * per_item + data_i++;
          tx[re] = symbols[src];
          for (std::size_t j = 0; j < nb; ++j) fr.bits[re * nb + j] = payload[src * nb + j];
        }
      }
    }
  }
  fr.tx = {ad::Tensor::complex({batch, nt, nf}, tx), GridRole::Tx};
  fr.pilots = {ad::Tensor::complex({batch, nt, nf}, sp), GridRole::PilotTemplate};
  return fr;
}

Frame make_frame(std::uint64_t seed, const SignalConfig& config, std::size_t batch) {
  const auto payload = generate_payload(seed, config, batch);
  return build_grid(map_symbols(payload, config.modulation), payload, config, batch);
}

}  // namespace rxprobe::link
