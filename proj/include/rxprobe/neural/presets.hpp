#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rxprobe/link/signal.hpp"
#include "rxprobe/neural/model.hpp"

namespace rxprobe::neural {

// Either a finite set drawn uniformly or a continuous interval [lo, hi].
struct ValueSampler {
  enum class Kind { Discrete, Uniform };
  Kind kind = Kind::Discrete;
  std::vector<double> values;
  double lo = 0.0;
  double hi = 0.0;

  static ValueSampler discrete(std::vector<double> values);
  static ValueSampler uniform(double lo, double hi);

  // Maps u in [0, 1) to a sample.
  double sample(double u) const;
  double min() const;
  double max() const;
  bool contains(double v) const;
};

struct TrainPreset {
  std::string name;
  std::vector<link::Modulation> modulations;
  ValueSampler ebn0_db;
  ValueSampler delay_spread_ns;
  ValueSampler speed_mps;
  std::vector<std::string> profiles;
  ModelConfig model;

  // Highest-order modulation: the one used when testing this preset.
  link::Modulation test_modulation() const;
};

// PTLC, FTLC, FTHC and FTHC-desk (FTHC data with the PTLC width, sized for
// single-core training).
const std::vector<TrainPreset>& builtin_presets();
const TrainPreset& find_preset(std::string_view name);

// Scenario of one training batch: modulation and channel profile are shared by
// the batch, the three channel parameters are drawn per item.
struct BatchDraw {
  link::Modulation modulation = link::Modulation::QAM16;
  std::string profile;
  std::vector<double> ebn0_db;
  std::vector<link::ScenarioParams> items;
};

BatchDraw draw_batch(const TrainPreset& preset, std::uint64_t seed, std::uint64_t step, std::size_t batch);

}  // namespace rxprobe::neural
