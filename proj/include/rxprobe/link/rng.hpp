#pragma once

#include <complex>
#include <cstdint>

namespace rxprobe::link {

// Stream tags keep the hierarchical seed derivation collision-free between
// unrelated consumers of the same parent seed.
enum class Stream : std::uint64_t {
  Payload = 1,
  Pilot = 2,
  TapGain = 3,
  TapAngle = 4,
  LosAngle = 5,
  LosPhase = 6,
  Noise = 7,
  Episode = 16,
  EpisodeStart = 17,
  Iteration = 18,
  Grid = 19,
  Validation = 20,
  Training = 21,
  TrainingScenario = 22,
  Benchmark = 23,
  ModelInit = 24,
};

std::uint64_t mix64(std::uint64_t x);

// Child seed for (parent, stream, index).
std::uint64_t derive_seed(std::uint64_t parent, Stream stream, std::uint64_t index = 0);

// Stateless counter-based generator: every draw is a pure function of the key
// and up to four counters, so a batch item's draws do not depend on how many
// other items are generated.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t bits(std::uint64_t c0, std::uint64_t c1 = 0, std::uint64_t c2 = 0, std::uint64_t c3 = 0) const;
  // Uniform in [0, 1).
  double uniform(std::uint64_t c0, std::uint64_t c1 = 0, std::uint64_t c2 = 0, std::uint64_t c3 = 0) const;
  // Circularly-symmetric complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_normal(std::uint64_t c0, std::uint64_t c1 = 0, std::uint64_t c2 = 0) const;

 private:
  std::uint64_t key_;
};

}  // namespace rxprobe::link
