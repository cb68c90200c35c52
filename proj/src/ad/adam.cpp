#include "rxprobe/ad/adam.hpp"

#include <cmath>
#include <string>

namespace rxprobe::ad {

void adam_step(AdamState& state, std::vector<Tensor>& params, const std::vector<Tensor>& grads) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("adam_step: " + std::to_string(params.size()) + " params vs " +
                                std::to_string(grads.size()) + " grads");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].raw_size() != grads[i].raw_size() || params[i].dtype() != grads[i].dtype()) {
      throw std::invalid_argument("adam_step: gradient " + std::to_string(i) + " " + shape_str(grads[i].shape()) +
                                  " does not match param " + shape_str(params[i].shape()));
    }
    for (double g : grads[i].data()) {
      if (!std::isfinite(g)) throw NonFiniteGradient("adam_step: non-finite gradient in parameter " + std::to_string(i));
    }
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.raw_size(), 0.0);
      state.second_moment.emplace_back(p.raw_size(), 0.0);
    }
  } else if (state.first_moment.size() != params.size()) {
    throw std::invalid_argument("adam_step: parameter list changed between steps");
  }

  ++state.step;
  const auto& c = state.config;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto g = grads[i].data();
    auto p = params[i].data();
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    std::vector<double> next(p.begin(), p.end());
    for (std::size_t k = 0; k < next.size(); ++k) {
      m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g[k];
      v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g[k] * g[k];
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      next[k] -= c.lr * mhat / (std::sqrt(vhat) + c.epsilon);
    }
    params[i] = params[i].is_complex() ? Tensor::complex(params[i].shape(), std::move(next))
                                       : Tensor::real(params[i].shape(), std::move(next));
  }
}

}  // namespace rxprobe::ad
