#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rxprobe/baseline/grid.hpp"
#include "rxprobe/baseline/metrics.hpp"
#include "rxprobe/search/campaign.hpp"

namespace rxprobe::baseline {

struct LabeledConfig {
  std::size_t id = 0;
  link::ScenarioParams params;
  search::Outcome label = search::Outcome::NotFail;
};

// Final parameters of each episode with its outcome as label.
std::vector<LabeledConfig> configs_from_campaign(const std::vector<search::EpisodeRecord>& records);
// Grid points flagged as failures. A grid point is a one-evaluation episode,
// so its failures are labeled FailInit.
std::vector<LabeledConfig> configs_from_grid(const std::vector<GridRecord>& records);

struct ValidationRecord {
  std::size_t id = 0;
  link::ScenarioParams params;
  search::Outcome label = search::Outcome::NotFail;
  double hard_ber_t = 0.0;
  double hard_ber_ai = 0.0;
  std::size_t n_bits = 0;

  // Label confirmed at threshold T.
  bool validated(double threshold) const;
  bool fails(double threshold) const;
  bool operator==(const ValidationRecord&) const = default;
};

using ValidationSink = std::function<void(const ValidationRecord&)>;

// Re-evaluates every config on n_realizations fresh realizations. Seeds depend
// only on (seed, config id), never on the label.
std::vector<ValidationRecord> validate_configs(const search::Evaluator& evaluator,
                                               const std::vector<LabeledConfig>& configs,
                                               std::size_t n_realizations, std::uint64_t seed,
                                               const ValidationSink& sink = {});

ConfusionCounts confusion(const std::vector<ValidationRecord>& records, double threshold);

}  // namespace rxprobe::baseline
