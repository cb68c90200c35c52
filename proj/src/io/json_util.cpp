#include "rxprobe/io/json_util.hpp"

#include <cstdint>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rxprobe::io {

void Fnv1a64::update(std::string_view bytes) {
  for (unsigned char c : bytes) {
    h_ ^= c;
    h_ *= 0x100000001b3ULL;
  }
}

std::string Fnv1a64::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h_));
  return buf;
}

std::string fnv1a64_hex(std::string_view bytes) {
  Fnv1a64 h;
  h.update(bytes);
  return h.hex();
}

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double to_double(const json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  return j.get<double>();
}

json to_json(const link::ScenarioParams& p) {
  return {{"speed_mps", p.speed_mps}, {"delay_spread_ns", p.delay_spread_ns}, {"noise_dbm", p.noise_dbm}};
}

link::ScenarioParams scenario_from_json(const json& j) {
  return {j.at("speed_mps").get<double>(), j.at("delay_spread_ns").get<double>(), j.at("noise_dbm").get<double>()};
}

std::string dump_line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::strict); }

std::string fixed(std::optional<double> v, int decimals) {
  if (!v) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, *v);
  return buf;
}

}  // namespace rxprobe::io
