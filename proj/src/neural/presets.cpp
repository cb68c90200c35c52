#include "rxprobe/neural/presets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rxprobe/link/rng.hpp"

namespace rxprobe::neural {

using link::Modulation;

ValueSampler ValueSampler::discrete(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("ValueSampler: empty value set");
  ValueSampler s;
  s.kind = Kind::Discrete;
  s.values = std::move(values);
  return s;
}

ValueSampler ValueSampler::uniform(double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("ValueSampler: interval lower bound above upper bound");
  ValueSampler s;
  s.kind = Kind::Uniform;
  s.lo = lo;
  s.hi = hi;
  return s;
}

double ValueSampler::sample(double u) const {
  if (kind == Kind::Uniform) return lo + (hi - lo) * u;
  const auto i = std::min(values.size() - 1, static_cast<std::size_t>(u * static_cast<double>(values.size())));
  return values[i];
}

double ValueSampler::min() const {
  return kind == Kind::Uniform ? lo : *std::min_element(values.begin(), values.end());
}

double ValueSampler::max() const {
  return kind == Kind::Uniform ? hi : *std::max_element(values.begin(), values.end());
}

bool ValueSampler::contains(double v) const {
  if (kind == Kind::Uniform) return v >= lo && v <= hi;
  return std::find(values.begin(), values.end(), v) != values.end();
}

Modulation TrainPreset::test_modulation() const {
  return *std::max_element(modulations.begin(), modulations.end(), [](Modulation a, Modulation b) {
    return link::bits_per_symbol(a) < link::bits_per_symbol(b);
  });
}

namespace {

std::vector<double> even_ebn0() {
  std::vector<double> v;
  for (int e = 0; e <= 22; e += 2) v.push_back(e);
  return v;
}

std::vector<TrainPreset> make_presets() {
  std::vector<TrainPreset> p;
  p.push_back({"PTLC",
               {Modulation::QAM16},
               ValueSampler::discrete({0, 1, 2, 3, 18, 19, 20}),
               ValueSampler::discrete({0, 10, 20, 300, 350, 400}),
               ValueSampler::discrete({0, 1, 2, 20, 25, 30}),
               {"TDL-D"},
               {5, 24, 4, 1}});
  p.push_back({"FTLC",
               {Modulation::QAM64},
               ValueSampler::discrete(even_ebn0()),
               ValueSampler::uniform(0, 400),
               ValueSampler::uniform(0, 30),
               {"TDL-D"},
               {5, 24, 6, 1}});
  p.push_back({"FTHC",
               {Modulation::QPSK, Modulation::QAM16, Modulation::QAM64},
               ValueSampler::discrete(even_ebn0()),
               ValueSampler::uniform(10, 400),
               ValueSampler::uniform(0, 30),
               {"TDL-B", "TDL-C", "TDL-D"},
               {11, 60, 6, 1}});
  TrainPreset desk = p.back();
  desk.name = "FTHC-desk";
  desk.model.channel_width = 24;
  p.push_back(desk);
  return p;
}

}  // namespace

const std::vector<TrainPreset>& builtin_presets() {
  static const std::vector<TrainPreset> presets = make_presets();
  return presets;
}

const TrainPreset& find_preset(std::string_view name) {
  for (const auto& p : builtin_presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown training preset '" + std::string(name) + "'");
}

BatchDraw draw_batch(const TrainPreset& preset, std::uint64_t seed, std::uint64_t step, std::size_t batch) {
  const link::CounterRng rng(link::derive_seed(seed, link::Stream::TrainingScenario, step));
  BatchDraw d;
  const auto pick = [&](std::size_t n, std::uint64_t c) {
    return std::min(n - 1, static_cast<std::size_t>(rng.uniform(c, 0, 1) * static_cast<double>(n)));
  };
  d.modulation = preset.modulations[pick(preset.modulations.size(), 0)];
  d.profile = preset.profiles[pick(preset.profiles.size(), 1)];
  for (std::size_t b = 0; b < batch; ++b) {
    const double ebn0 = preset.ebn0_db.sample(rng.uniform(b, 1));
    link::ScenarioParams s;
    s.speed_mps = preset.speed_mps.sample(rng.uniform(b, 2));
    s.delay_spread_ns = preset.delay_spread_ns.sample(rng.uniform(b, 3));
    s.noise_dbm = -link::ebn0_to_snr_db(ebn0, d.modulation);
    d.ebn0_db.push_back(ebn0);
    d.items.push_back(s);
  }
  return d;
}

}  // namespace rxprobe::neural
