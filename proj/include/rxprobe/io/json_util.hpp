#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rxprobe/link/signal.hpp"

namespace rxprobe::io {

using json = nlohmann::json;

// Incremental 64-bit FNV-1a.
class Fnv1a64 {
 public:
  void update(std::string_view bytes);
  std::uint64_t value() const { return h_; }
  std::string hex() const;  // 16 lowercase hex digits

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string fnv1a64_hex(std::string_view bytes);

json to_json(const link::ScenarioParams& p);
link::ScenarioParams scenario_from_json(const json& j);

// Non-finite doubles are stored as the strings "nan", "inf" and "-inf".
json number(double v);
double to_double(const json& j);

// Canonical one-line serialization used in record files.
std::string dump_line(const json& j);

// Fixed-point text with `decimals` digits, or "n/a" when empty.
std::string fixed(std::optional<double> v, int decimals);

}  // namespace rxprobe::io
