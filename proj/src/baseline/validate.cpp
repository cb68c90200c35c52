#include "rxprobe/baseline/validate.hpp"

#include <stdexcept>

#include "rxprobe/link/rng.hpp"

namespace rxprobe::baseline {

std::vector<LabeledConfig> configs_from_campaign(const std::vector<search::EpisodeRecord>& records) {
  std::vector<LabeledConfig> out;
  for (const auto& r : records)
    if (!r.trace.empty()) out.push_back({r.episode, r.final().params, r.outcome});
  return out;
}

std::vector<LabeledConfig> configs_from_grid(const std::vector<GridRecord>& records) {
  std::vector<LabeledConfig> out;
  for (const auto& r : records)
    if (r.failure) out.push_back({r.id, r.params, search::Outcome::FailInit});
  return out;
}

bool ValidationRecord::fails(double threshold) const {
  return search::failure_criterion(hard_ber_t, hard_ber_ai, threshold);
}

bool ValidationRecord::validated(double threshold) const {
  return fails(threshold) == (label != search::Outcome::NotFail);
}

std::vector<ValidationRecord> validate_configs(const search::Evaluator& evaluator,
                                               const std::vector<LabeledConfig>& configs,
                                               std::size_t n_realizations, std::uint64_t seed,
                                               const ValidationSink& sink) {
  if (n_realizations < 1) throw std::invalid_argument("validation needs at least one realization");
  std::vector<ValidationRecord> out;
  out.reserve(configs.size());
  for (const auto& c : configs) {
    const auto e = evaluator.evaluate_hard(c.params, link::derive_seed(seed, link::Stream::Validation, c.id),
                                           n_realizations);
    out.push_back({c.id, c.params, c.label, e.hard_ber_t, e.hard_ber_ai, e.n_bits});
    if (sink) sink(out.back());
  }
  return out;
}

ConfusionCounts confusion(const std::vector<ValidationRecord>& records, double threshold) {
  ConfusionCounts c;
  for (const auto& r : records) {
    auto& cell = c.at(r.label);
    if (r.validated(threshold))
      ++cell.validated_true;
    else
      ++cell.validated_false;
  }
  return c;
}

}  // namespace rxprobe::baseline
