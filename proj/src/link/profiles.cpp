#include "rxprobe/link/profiles.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace rxprobe::link {

double ChannelProfile::k_factor_linear() const { return std::pow(10.0, k_factor_db / 10.0); }

double ChannelProfile::rms_delay() const {
  double mean = 0.0;
  for (std::size_t p = 0; p < n_taps(); ++p) mean += powers[p] * delays[p];
  double var = 0.0;
  for (std::size_t p = 0; p < n_taps(); ++p) var += powers[p] * (delays[p] - mean) * (delays[p] - mean);
  return std::sqrt(var);
}

void ChannelProfile::validate() const {
  const std::string where = "profile '" + name + "': ";
  if (delays.empty()) throw std::invalid_argument(where + "no taps");
  if (delays.size() != powers.size()) throw std::invalid_argument(where + "delays and powers differ in length");
  if (delays.front() != 0.0) throw std::invalid_argument(where + "first delay must be 0");
  double total = 0.0;
  for (std::size_t p = 0; p < delays.size(); ++p) {
    if (!(delays[p] >= 0.0) || !std::isfinite(delays[p])) throw std::invalid_argument(where + "negative delay");
    if (!(powers[p] >= 0.0) || !std::isfinite(powers[p])) throw std::invalid_argument(where + "negative power");
    total += powers[p];
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument(where + "powers do not sum to 1");
  if (los && !std::isfinite(k_factor_db)) throw std::invalid_argument(where + "K-factor must be finite");
}

ChannelProfile make_profile(std::string name, std::vector<double> delays, const std::vector<double>& powers_db,
                            bool los, double k_factor_db) {
  ChannelProfile p;
  p.name = std::move(name);
  p.delays = std::move(delays);
  double total = 0.0;
  for (double db : powers_db) {
    p.powers.push_back(std::pow(10.0, db / 10.0));
    total += p.powers.back();
  }
  for (double& w : p.powers) w /= total;
  p.los = los;
  p.k_factor_db = k_factor_db;
  p.validate();
  return p;
}

const std::vector<ChannelProfile>& default_profiles() {
  static const std::vector<ChannelProfile> profiles = {
      make_profile("TDL-B", {0.0, 0.304, 0.76, 1.8239, 3.0398, 4.5598}, {0.0, -2.2, -4.0, -5.5, -9.8, -12.0}),
      make_profile("TDL-C", {0.0, 0.4406, 0.9913, 1.7623, 3.0841, 5.287}, {-4.4, -1.2, -3.5, -5.2, -9.1, -14.0}),
      make_profile("TDL-D", {0.0, 1.0229, 2.3016, 3.5803, 5.1146, 7.1605}, {-0.2, -18.8, -21.0, -22.8, -17.9, -20.1},
                   true, 10.0),
  };
  return profiles;
}

const ChannelProfile& find_profile(const std::vector<ChannelProfile>& profiles, std::string_view name) {
  for (const auto& p : profiles)
    if (p.name == name) return p;
  throw std::invalid_argument("unknown channel profile '" + std::string(name) + "'");
}

const ChannelProfile& default_profile(std::string_view name) { return find_profile(default_profiles(), name); }

std::vector<ChannelProfile> load_profiles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  std::vector<ChannelProfile> out;
  const auto& list = doc.at("profiles");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& e = list[i];
    try {
      out.push_back(make_profile(e.at("name").get<std::string>(), e.at("delays").get<std::vector<double>>(),
                                 e.at("powers_db").get<std::vector<double>>(), e.value("los", false),
                                 e.value("k_factor_db", 0.0)));
    } catch (const nlohmann::json::exception& ex) {
      throw std::invalid_argument(path + ": profiles[" + std::to_string(i) + "]: " + ex.what());
    }
  }
  return out;
}

}  // namespace rxprobe::link
