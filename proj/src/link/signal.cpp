#include "rxprobe/link/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rxprobe::link {

std::size_t bits_per_symbol(Modulation m) {
  switch (m) {
    case Modulation::QPSK: return 2;
    case Modulation::QAM16: return 4;
    case Modulation::QAM64: return 6;
  }
  throw std::invalid_argument("unknown modulation");
}

std::string to_string(Modulation m) {
  switch (m) {
    case Modulation::QPSK: return "QPSK";
    case Modulation::QAM16: return "16QAM";
    case Modulation::QAM64: return "64QAM";
  }
  return "?";
}

Modulation modulation_from_string(std::string_view name) {
  if (name == "QPSK" || name == "qpsk") return Modulation::QPSK;
  if (name == "16QAM" || name == "16qam" || name == "QAM16") return Modulation::QAM16;
  if (name == "64QAM" || name == "64qam" || name == "QAM64") return Modulation::QAM64;
  throw std::invalid_argument("unknown modulation '" + std::string(name) + "' (expected QPSK, 16QAM or 64QAM)");
}

double SignalConfig::symbol_duration_s() const {
  const double slot = 1e-3 * 15e3 / subcarrier_spacing_hz;
  return slot / static_cast<double>(n_symbols);
}

bool SignalConfig::is_pilot_symbol(std::size_t t) const {
  return std::find(pilot_symbols.begin(), pilot_symbols.end(), t) != pilot_symbols.end();
}

void SignalConfig::validate() const {
  if (n_symbols == 0 || n_prb == 0) throw std::invalid_argument("signal: n_symbols and n_prb must be positive");
  if (!(subcarrier_spacing_hz > 0)) throw std::invalid_argument("signal: subcarrier spacing must be positive");
  if (!(carrier_frequency_hz > 0)) throw std::invalid_argument("signal: carrier frequency must be positive");
  if (pilot_symbols.empty()) throw std::invalid_argument("signal: at least one pilot symbol is required");
  for (std::size_t i = 0; i < pilot_symbols.size(); ++i) {
    if (pilot_symbols[i] >= n_symbols) throw std::invalid_argument("signal: pilot symbol index out of range");
    if (i > 0 && pilot_symbols[i] <= pilot_symbols[i - 1])
      throw std::invalid_argument("signal: pilot symbol indices must be strictly increasing");
  }
  if (pilot_symbols.size() >= n_symbols) throw std::invalid_argument("signal: no data symbols left");
}

double ebn0_to_snr_db(double ebn0_db, Modulation m) {
  return ebn0_db + 10.0 * std::log10(static_cast<double>(bits_per_symbol(m)));
}

}  // namespace rxprobe::link
