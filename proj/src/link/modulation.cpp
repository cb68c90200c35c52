#include "rxprobe/link/modulation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rxprobe::link {
namespace {

Constellation build(Modulation m) {
  Constellation c;
  c.modulation = m;
  c.bits = bits_per_symbol(m);
  c.bits_per_axis = c.bits / 2;
  const std::size_t levels = std::size_t{1} << c.bits_per_axis;
  const double order = static_cast<double>(levels * levels);
  c.scale = 1.0 / std::sqrt(2.0 * (order - 1.0) / 3.0);
  c.levels.resize(levels);
  for (std::size_t word = 0; word < levels; ++word) {
    std::size_t n = word;  // Gray -> binary
    for (std::size_t shift = 1; shift < c.bits_per_axis; shift <<= 1) n ^= n >> shift;
    c.levels[word] = (static_cast<double>(levels) - 1.0 - 2.0 * static_cast<double>(n)) * c.scale;
  }
  return c;
}

}  // namespace

std::uint8_t Constellation::axis_bit(std::size_t word, std::size_t j, std::size_t bits_per_axis) {
  return static_cast<std::uint8_t>((word >> (bits_per_axis - 1 - j)) & 1U);
}

std::vector<std::complex<double>> Constellation::points() const {
  const std::size_t levels_n = levels.size();
  std::vector<std::complex<double>> pts(levels_n * levels_n);
  for (std::size_t wi = 0; wi < levels_n; ++wi)
    for (std::size_t wq = 0; wq < levels_n; ++wq) pts[(wi << bits_per_axis) | wq] = {levels[wi], levels[wq]};
  return pts;
}

const Constellation& constellation(Modulation m) {
  static const Constellation qpsk = build(Modulation::QPSK);
  static const Constellation qam16 = build(Modulation::QAM16);
  static const Constellation qam64 = build(Modulation::QAM64);
  switch (m) {
    case Modulation::QPSK: return qpsk;
    case Modulation::QAM16: return qam16;
    case Modulation::QAM64: return qam64;
  }
  throw std::invalid_argument("unknown modulation");
}

std::vector<std::complex<double>> map_symbols(std::span<const std::uint8_t> bits, Modulation m) {
  const Constellation& c = constellation(m);
  if (bits.size() % c.bits != 0) {
    throw std::invalid_argument("map_symbols: " + std::to_string(bits.size()) + " bits is not a multiple of " +
                                std::to_string(c.bits) + " for " + to_string(m));
  }
  std::vector<std::complex<double>> out(bits.size() / c.bits);
  for (std::size_t s = 0; s < out.size(); ++s) {
    std::size_t wi = 0, wq = 0;
    for (std::size_t j = 0; j < c.bits_per_axis; ++j) {
      wi = (wi << 1) | (bits[s * c.bits + j] & 1U);
      wq = (wq << 1) | (bits[s * c.bits + c.bits_per_axis + j] & 1U);
    }
    out[s] = {c.levels[wi], c.levels[wq]};
  }
  return out;
}

std::vector<std::uint8_t> demap_nearest(std::span<const std::complex<double>> symbols, Modulation m) {
  const Constellation& c = constellation(m);
  const auto pts = c.points();
  std::vector<std::uint8_t> bits(symbols.size() * c.bits);
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < pts.size(); ++w) {
      const double d = std::norm(symbols[s] - pts[w]);
      if (d < best_d) {
        best_d = d;
        best = w;
      }
    }
    for (std::size_t j = 0; j < c.bits; ++j) bits[s * c.bits + j] = static_cast<std::uint8_t>((best >> (c.bits - 1 - j)) & 1U);
  }
  return bits;
}

}  // namespace rxprobe::link
