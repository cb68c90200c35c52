#include "rxprobe/baseline/cost_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rxprobe::baseline {

void CostModelInput::validate() const {
  if (d < 1) throw std::invalid_argument("cost model: d must be >= 1");
  if (k.empty()) throw std::invalid_argument("cost model: k must list at least one value");
  if (k.size() != 1 && k.size() != d) {
    throw std::invalid_argument("cost model: k lists " + std::to_string(k.size()) + " values for d = " +
                                std::to_string(d));
  }
  for (auto v : k)
    if (v < 1) throw std::invalid_argument("cost model: k values must be >= 1");
  if (n_episodes < 1 || max_iters < 1) throw std::invalid_argument("cost model: episodes and iterations must be >= 1");
  if (!(early_stop_factor > 0.0) || early_stop_factor > 1.0) {
    throw std::invalid_argument("cost model: early-stop factor must be in (0, 1]");
  }
}

CostModelOutput cost_model(const CostModelInput& in) {
  in.validate();
  CostModelOutput out;
  out.grid_tests = 1.0;
  for (std::size_t i = 0; i < in.d; ++i) out.grid_tests *= static_cast<double>(in.k.size() == 1 ? in.k[0] : in.k[i]);
  out.gradient_tests = static_cast<double>(in.n_episodes) * static_cast<double>(in.max_iters) *
                       static_cast<double>(in.d) * in.early_stop_factor;
  return out;
}

std::vector<CostCurveRow> cost_curves(std::size_t k, std::size_t n_episodes, std::size_t max_iters,
                                      std::size_t d_max) {
  std::vector<CostCurveRow> rows;
  for (std::size_t d = 1; d <= d_max; ++d) {
    CostModelInput in{{k}, d, n_episodes, max_iters, 1.0};
    const auto full = cost_model(in);
    in.early_stop_factor = 0.5;
    const auto half = cost_model(in);
    in.early_stop_factor = 0.25;
    const auto quarter = cost_model(in);
    rows.push_back({d, full.grid_tests, full.gradient_tests, half.gradient_tests, quarter.gradient_tests});
  }
  return rows;
}

}  // namespace rxprobe::baseline
