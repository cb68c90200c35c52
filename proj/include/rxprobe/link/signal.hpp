#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rxprobe::link {

enum class Modulation { QPSK, QAM16, QAM64 };

std::size_t bits_per_symbol(Modulation m);
std::string to_string(Modulation m);
Modulation modulation_from_string(std::string_view name);

constexpr double kSpeedOfLight = 299'792'458.0;

// Uplink slot layout: 14 OFDM symbols, 15 kHz spacing, 6 PRBs, two DM-RS
// symbols carrying pilots on every subcarrier.
struct SignalConfig {
  std::size_t n_symbols = 14;
  double subcarrier_spacing_hz = 15e3;
  std::size_t n_prb = 6;
  std::vector<std::size_t> pilot_symbols{2, 11};
  Modulation modulation = Modulation::QAM16;
  double carrier_frequency_hz = 3.5e9;

  std::size_t n_subcarriers() const { return 12 * n_prb; }
  std::size_t n_data_symbols() const { return n_symbols - pilot_symbols.size(); }
  std::size_t data_res_per_item() const { return n_data_symbols() * n_subcarriers(); }
  // OFDM symbol period including cyclic prefix (a 1 ms slot at 15 kHz).
  double symbol_duration_s() const;
  bool is_pilot_symbol(std::size_t t) const;

  void validate() const;
};

// The three searched scenario leaves in canonical units.
struct ScenarioParams {
  double speed_mps = 0.0;
  double delay_spread_ns = 0.0;
  double noise_dbm = 0.0;  // relative to unit signal power, so SNR_dB = -noise_dbm

  double snr_db() const { return -noise_dbm; }
  bool operator==(const ScenarioParams&) const = default;
};

// SNR (dB) for an uncoded Eb/N0 at the given modulation.
double ebn0_to_snr_db(double ebn0_db, Modulation m);

}  // namespace rxprobe::link
