#pragma once

#include <cstdint>
#include <vector>

#include "rxprobe/ad/tensor.hpp"
#include "rxprobe/link/grid.hpp"
#include "rxprobe/link/signal.hpp"

namespace rxprobe::rx {

constexpr double kLlrMax = 20.0;
constexpr double kDenominatorFloor = 1e-12;

enum class Demapper { MaxLog, Exact };

// LS estimate at pilot REs, then linear interpolation: along frequency
// inside each pilot symbol, then along time between pilot symbols with the
// edge values held outside. All pilot symbols must share the same pilot
// subcarriers. Inputs are complex (batch, n_symbols, n_subcarriers);
// `pilot_mask` is (n_symbols, n_subcarriers).
ad::Tensor ls_estimate(const ad::Tensor& rx, const ad::Tensor& pilots, const std::vector<std::uint8_t>& pilot_mask,
                       std::size_t n_symbols, std::size_t n_subcarriers);

// Constant interpolation weights used by ls_estimate: (n, n_pilots) rows
// with linear weights between pilots and edge hold outside.
std::vector<double> interpolation_matrix(const std::vector<std::size_t>& pilot_positions, std::size_t n);

struct Equalized {
  ad::Tensor symbols;    // complex, same shape as the grid
  ad::Tensor noise_var;  // real post-equalization variance per RE
};

// x = conj(H) y / (|H|^2 + s2), s2_eff = s2 / (|H|^2 + s2). The denominator
// is floored at kDenominatorFloor. `noise_var` broadcasts against the grid.
Equalized lmmse_equalize(const ad::Tensor& rx, const ad::Tensor& h_hat, const ad::Tensor& noise_var);

// Per-bit LLRs, positive meaning bit 0 is more likely, clamped to +-kLlrMax.
// Output is real (..., bits_per_symbol) with I-axis bits first.
ad::Tensor demap_llr(const ad::Tensor& symbols, const ad::Tensor& noise_var, link::Modulation modulation,
                     Demapper kind = Demapper::MaxLog);

// Bit labels and the BER mask for an LLR grid of shape
// (batch, n_symbols, n_subcarriers, planes). Payload bits fill the first
// bits_per_symbol planes of data REs; everything else is masked out.
struct BitTargets {
  ad::Shape shape;
  std::vector<std::uint8_t> bits;
  std::vector<std::uint8_t> mask;
  std::size_t n_bits = 0;
  ad::Tensor sign;    // 2b - 1 on masked bits, 0 elsewhere
  ad::Tensor weight;  // 1 / n_bits on masked bits, 0 elsewhere

  static BitTargets from_frame(const link::Frame& frame, std::size_t planes);
  static BitTargets from_bits(ad::Shape shape, std::vector<std::uint8_t> bits, std::vector<std::uint8_t> mask);
};

// Fraction of masked bits whose decision (1 iff LLR < 0) is wrong.
double hard_ber(const ad::Tensor& llr, const BitTargets& targets);
double hard_ber(const ad::Tensor& llr, const std::vector<std::uint8_t>& bits, const std::vector<std::uint8_t>& mask);

// Mean over masked bits of sigmoid(-(1 - 2b) LLR): the error probability the
// LLRs imply. Differentiable.
ad::Tensor soft_ber(const ad::Tensor& llr, const BitTargets& targets);
ad::Tensor soft_ber(const ad::Tensor& llr, const std::vector<std::uint8_t>& bits, const std::vector<std::uint8_t>& mask);

// Mean over masked bits of softplus(-(1 - 2b) LLR), i.e. binary cross-entropy
// of sigmoid(LLR) as P(bit = 0).
ad::Tensor bce_loss(const ad::Tensor& llr, const BitTargets& targets);

struct ClassicOutput {
  ad::Tensor h_ls;  // H_r, shared with the neural receiver input
  ad::Tensor llr;
};

// LS -> LMMSE -> demapper.
ClassicOutput classic_receiver(const ad::Tensor& rx, const link::Frame& frame, const ad::Tensor& noise_var,
                               const link::SignalConfig& config, Demapper kind = Demapper::MaxLog);

}  // namespace rxprobe::rx
