#pragma once

#include <cstdint>
#include <vector>

#include "rxprobe/ad/tensor.hpp"
#include "rxprobe/link/signal.hpp"

namespace rxprobe::link {

enum class GridRole { Tx, Rx, PilotTemplate, ChannelEstimate };

// Complex (batch, n_symbols, n_subcarriers) grid with a role tag.
struct ResourceGrid {
  ad::Tensor values;
  GridRole role = GridRole::Tx;

  std::size_t batch() const { return values.dim(0); }
};

// One transmitted batch: grids, the pilot layout and the payload bits.
struct Frame {
  ResourceGrid tx;
  ResourceGrid pilots;                // S_p: pilot values at pilot REs, 0 elsewhere
  std::vector<std::uint8_t> pilot_mask;  // (n_symbols, n_subcarriers), 1 at pilot REs
  // (batch, n_symbols, n_subcarriers, bits_per_symbol); zero at pilot REs.
  std::vector<std::uint8_t> bits;
  std::size_t bits_per_symbol = 0;
};

// i.i.d. bits for every data RE, ordered (batch, data RE, bit). Item b's
// bits only depend on (seed, b).
std::vector<std::uint8_t> generate_payload(std::uint64_t seed, const SignalConfig& config, std::size_t batch);

// Fixed QPSK pilot sequence (n_pilot_symbols * n_subcarriers values, symbol-major).
const std::vector<std::complex<double>>& pilot_sequence(const SignalConfig& config);

std::vector<std::uint8_t> pilot_mask(const SignalConfig& config);

// `symbols` holds batch * data_res_per_item() data symbols in RE order.
Frame build_grid(const std::vector<std::complex<double>>& symbols, const std::vector<std::uint8_t>& payload,
                 const SignalConfig& config, std::size_t batch);

// generate_payload + map_symbols + build_grid.
Frame make_frame(std::uint64_t seed, const SignalConfig& config, std::size_t batch);

}  // namespace rxprobe::link
