#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "rxprobe/link/signal.hpp"
#include "rxprobe/search/evaluator.hpp"

namespace rxprobe::baseline {

// `count` lattice points from min to max inclusive; count 1 gives {min}.
struct GridAxis {
  double min = 0.0;
  double max = 1.0;
  std::size_t count = 1;

  std::vector<double> values() const;
};

// Speed (m/s), delay spread (ns) and SNR (dB).
struct GridSpec {
  GridAxis speed{0.0, 30.0, 25};
  GridAxis delay_spread{0.0, 400.0, 25};
  GridAxis snr_db{0.0, 22.0, 16};

  void validate() const;
  std::size_t total_points() const { return speed.count * delay_spread.count * snr_db.count; }
  // Point `id` in speed-major order, canonical units.
  link::ScenarioParams point(std::size_t id) const;
};

struct GridRecord {
  std::size_t id = 0;
  link::ScenarioParams params;
  double hard_ber_t = 0.0;
  double hard_ber_ai = 0.0;
  bool failure = false;

  bool operator==(const GridRecord&) const = default;
};

using GridSink = std::function<void(const GridRecord&)>;

// Every point evaluated once with `batch` realizations keyed by
// derive_seed(seed, Grid, id); each point is one test.
std::vector<GridRecord> run_grid(const search::Evaluator& evaluator, const GridSpec& spec, std::size_t batch,
                                 double threshold, std::uint64_t seed, const GridSink& sink = {});

}  // namespace rxprobe::baseline
