#include "rxprobe/baseline/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "rxprobe/link/channel.hpp"
#include "rxprobe/link/rng.hpp"

namespace rxprobe::baseline {

std::vector<double> GridAxis::values() const {
  if (count == 1) return {min};
  std::vector<double> v(count);
  const double step = (max - min) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) v[i] = min + step * static_cast<double>(i);
  v.back() = max;
  return v;
}

void GridSpec::validate() const {
  const auto check = [](const GridAxis& a, const char* name) {
    if (a.count < 1) throw std::invalid_argument(std::string("grid.") + name + ".count must be >= 1");
    if (!std::isfinite(a.min) || !std::isfinite(a.max) || a.max < a.min) {
      throw std::invalid_argument(std::string("grid.") + name + ": max must not be below min");
    }
  };
  check(speed, "speed");
  check(delay_spread, "delay_spread");
  check(snr_db, "snr_db");
}

link::ScenarioParams GridSpec::point(std::size_t id) const {
  if (id >= total_points()) throw std::out_of_range("grid point id out of range");
  const std::size_t k = id % snr_db.count;
  const std::size_t j = (id / snr_db.count) % delay_spread.count;
  const std::size_t i = id / (snr_db.count * delay_spread.count);
  return {speed.values()[i], delay_spread.values()[j], -snr_db.values()[k]};
}

std::vector<GridRecord> run_grid(const search::Evaluator& evaluator, const GridSpec& spec, std::size_t batch,
                                 double threshold, std::uint64_t seed, const GridSink& sink) {
  spec.validate();
  if (batch < 1) throw std::invalid_argument("grid batch must be >= 1");
  std::vector<GridRecord> out;
  out.reserve(spec.total_points());
  for (std::size_t id = 0; id < spec.total_points(); ++id) {
    const auto p = spec.point(id);
    link::check_scenario(p);
    const auto e = evaluator.evaluate_hard(p, link::derive_seed(seed, link::Stream::Grid, id), batch, batch);
    out.push_back({id, p, e.hard_ber_t, e.hard_ber_ai, search::failure_criterion(e.hard_ber_t, e.hard_ber_ai, threshold)});
    if (sink) sink(out.back());
  }
  return out;
}

}  // namespace rxprobe::baseline
