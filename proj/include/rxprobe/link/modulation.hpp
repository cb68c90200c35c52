#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "rxprobe/link/signal.hpp"

namespace rxprobe::link {

// Square QAM built from two independent Gray-coded PAM axes.
//
// Bit order per symbol: the I-axis bits first, then the Q-axis bits, each
// MSB-first. An axis word g is Gray-decoded to n and mapped to the amplitude
// (L - 1 - 2n) * scale, L = 2^(bits per axis), so all-zero bits give the most
// positive level. QPSK bits 00 therefore map to (1 + 1j) / sqrt(2).
struct Constellation {
  Modulation modulation;
  std::size_t bits = 0;           // per symbol
  std::size_t bits_per_axis = 0;
  double scale = 1.0;             // unit average symbol power
  // levels[w] is the amplitude of axis word w (w read MSB-first).
  std::vector<double> levels;

  // Every point, indexed by the symbol's bit word (I bits high, Q bits low).
  std::vector<std::complex<double>> points() const;
  // Bit j (0 = MSB) of axis word w.
  static std::uint8_t axis_bit(std::size_t word, std::size_t j, std::size_t bits_per_axis);
};

const Constellation& constellation(Modulation m);

// bits.size() must be a multiple of bits_per_symbol(m).
std::vector<std::complex<double>> map_symbols(std::span<const std::uint8_t> bits, Modulation m);

// Exhaustive nearest-point decision (test oracle).
std::vector<std::uint8_t> demap_nearest(std::span<const std::complex<double>> symbols, Modulation m);

}  // namespace rxprobe::link
