#pragma once

#include <vector>

namespace rxprobe::baseline {

struct CostModelInput {
  std::vector<std::size_t> k{10};  // points per axis; a single value applies to every axis
  std::size_t d = 3;
  std::size_t n_episodes = 100;
  std::size_t max_iters = 100;
  double early_stop_factor = 1.0;  // 1, 1/2 or 1/4 of max_iters on average

  void validate() const;
};

struct CostModelOutput {
  double grid_tests = 0.0;      // product of k over d axes
  double gradient_tests = 0.0;  // n_episodes * max_iters * d * factor
};

CostModelOutput cost_model(const CostModelInput& input);

struct CostCurveRow {
  std::size_t d = 0;
  double grid = 0.0;
  double gradient_full = 0.0;
  double gradient_half = 0.0;
  double gradient_quarter = 0.0;
};

// Rows for d = 1 .. d_max with a single k per axis.
std::vector<CostCurveRow> cost_curves(std::size_t k, std::size_t n_episodes, std::size_t max_iters,
                                      std::size_t d_max = 10);

}  // namespace rxprobe::baseline
