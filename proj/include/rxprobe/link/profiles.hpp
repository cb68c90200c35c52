#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rxprobe::link {

// Tapped-delay-line profile. Delays are normalized so that the profile's RMS
// delay spread is 1; the scenario delay spread x_d (ns) scales them.
// Powers are linear and sum to 1. With `los`, the first tap is Rician with
// the given K-factor: K/(K+1) of its power is a specular component.
struct ChannelProfile {
  std::string name;
  std::vector<double> delays;
  std::vector<double> powers;
  bool los = false;
  double k_factor_db = 0.0;

  std::size_t n_taps() const { return delays.size(); }
  double k_factor_linear() const;
  // Normalized RMS delay spread of the power-delay profile.
  double rms_delay() const;

  void validate() const;
};

// Powers are given in dB and normalized to unit sum.
ChannelProfile make_profile(std::string name, std::vector<double> delays, const std::vector<double>& powers_db,
                            bool los = false, double k_factor_db = 0.0);

// Built-in tables (identical to data/channel_profiles.json).
const std::vector<ChannelProfile>& default_profiles();
const ChannelProfile& default_profile(std::string_view name);

// Reads {"profiles": [{name, delays, powers_db, los, k_factor_db}, ...]}.
std::vector<ChannelProfile> load_profiles(const std::string& path);
const ChannelProfile& find_profile(const std::vector<ChannelProfile>& profiles, std::string_view name);

}  // namespace rxprobe::link
