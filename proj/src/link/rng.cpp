#include "rxprobe/link/rng.hpp"

#include <cmath>
#include <numbers>

namespace rxprobe::link {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, Stream stream, std::uint64_t index) {
  return mix64(mix64(parent ^ mix64(static_cast<std::uint64_t>(stream))) + index);
}

std::uint64_t CounterRng::bits(std::uint64_t c0, std::uint64_t c1, std::uint64_t c2, std::uint64_t c3) const {
  std::uint64_t h = mix64(key_);
  h = mix64(h ^ c0);
  h = mix64(h + 0xD1B54A32D192ED03ULL * (c1 + 1));
  h = mix64(h ^ (0x8CB92BA72F3D8DD7ULL * (c2 + 1)));
  h = mix64(h + c3);
  return h;
}

double CounterRng::uniform(std::uint64_t c0, std::uint64_t c1, std::uint64_t c2, std::uint64_t c3) const {
  return static_cast<double>(bits(c0, c1, c2, c3) >> 11) * 0x1.0p-53;
}

std::complex<double> CounterRng::complex_normal(std::uint64_t c0, std::uint64_t c1, std::uint64_t c2) const {
  // Box-Muller; both outputs of one transform are independent N(0, 1).
  const double u1 = 1.0 - uniform(c0, c1, c2, 0);  // (0, 1]
  const double u2 = uniform(c0, c1, c2, 1);
  const double r = std::sqrt(-std::log(u1));        // sqrt(-2 ln u1) / sqrt(2)
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace rxprobe::link
