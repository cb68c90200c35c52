#pragma once

#include <array>
#include <optional>

#include "rxprobe/search/episode.hpp"

namespace rxprobe::baseline {

// Validation verdicts per labeled outcome class. "True" means validation
// agrees with the label: a failure label that still fails, or a NotFail label
// that still does not.
struct ConfusionCounts {
  struct Cell {
    std::size_t validated_true = 0;
    std::size_t validated_false = 0;
    std::size_t total() const { return validated_true + validated_false; }
    bool operator==(const Cell&) const = default;
  };
  Cell fail_search, fail_init, not_fail;

  Cell& at(search::Outcome o);
  const Cell& at(search::Outcome o) const;
  std::size_t total() const { return fail_search.total() + fail_init.total() + not_fail.total(); }

  std::size_t true_positives() const { return fail_search.validated_true + fail_init.validated_true; }
  std::size_t false_positives() const { return fail_search.validated_false + fail_init.validated_false; }
  std::size_t true_negatives() const { return not_fail.validated_true; }
  std::size_t false_negatives() const { return not_fail.validated_false; }
  bool operator==(const ConfusionCounts&) const = default;
};

// Empty when the denominator is zero.
struct Metrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
};

Metrics compute_metrics(const ConfusionCounts& counts);

// total_tests / validated_failures; empty when no failure was validated.
std::optional<double> tests_per_failure(std::size_t total_tests, std::size_t validated_failures);

// Relative reduction of tests per failure, (grid - gradient) / grid.
std::optional<double> relative_reduction(std::optional<double> gradient, std::optional<double> grid);

}  // namespace rxprobe::baseline
