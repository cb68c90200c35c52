#include "rxprobe/baseline/metrics.hpp"

namespace rxprobe::baseline {

ConfusionCounts::Cell& ConfusionCounts::at(search::Outcome o) {
  switch (o) {
    case search::Outcome::FailSearch: return fail_search;
    case search::Outcome::FailInit: return fail_init;
    case search::Outcome::NotFail: break;
  }
  return not_fail;
}

const ConfusionCounts::Cell& ConfusionCounts::at(search::Outcome o) const {
  return const_cast<ConfusionCounts&>(*this).at(o);
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Metrics compute_metrics(const ConfusionCounts& c) {
  const std::size_t tp = c.true_positives(), fp = c.false_positives(), tn = c.true_negatives(),
                    fn = c.false_negatives();
  return {ratio(tp + tn, c.total()), ratio(tp, tp + fp), ratio(tp, tp + fn)};
}

std::optional<double> tests_per_failure(std::size_t total_tests, std::size_t validated_failures) {
  return ratio(total_tests, validated_failures);
}

std::optional<double> relative_reduction(std::optional<double> gradient, std::optional<double> grid) {
  if (!gradient || !grid || *grid == 0.0) return std::nullopt;
  return (*grid - *gradient) / *grid;
}

}  // namespace rxprobe::baseline
