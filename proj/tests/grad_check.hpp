#pragma once

#include <functional>
#include <random>
#include <vector>

#include "rxprobe/ad/finite_diff.hpp"
#include "rxprobe/ad/ops.hpp"
#include "rxprobe/ad/tape.hpp"

namespace rxprobe::testing {

using LossBuilder = std::function<ad::Tensor(const std::vector<ad::Tensor>&)>;

inline ad::Tensor with_raw(const ad::Tensor& like, std::vector<double> raw) {
  return like.is_complex() ? ad::Tensor::complex(like.shape(), std::move(raw)) : ad::Tensor::real(like.shape(), std::move(raw));
}

struct GradCheck {
  std::vector<double> analytic;
  std::vector<double> numeric;
  double rel_error = 0.0;
};

// Tape gradient of `loss` at `values` against central differences, over the
// raw coordinates of every input.
inline GradCheck grad_check(const LossBuilder& loss, const std::vector<ad::Tensor>& values, double eps = 1e-6) {
  GradCheck out;
  {
    ad::Tape tape;
    std::vector<ad::Tensor> leaves;
    for (const auto& v : values) leaves.push_back(tape.watch(v));
    const auto grads = tape.backward(loss(leaves));
    for (const auto& l : leaves) {
      const ad::Tensor gl = grads.wrt(l);
      auto g = gl.data();
      out.analytic.insert(out.analytic.end(), g.begin(), g.end());
    }
  }
  std::vector<double> flat;
  for (const auto& v : values) flat.insert(flat.end(), v.data().begin(), v.data().end());
  auto f = [&](std::span<const double> x) {
    std::vector<ad::Tensor> args;
    std::size_t off = 0;
    for (const auto& v : values) {
      args.push_back(with_raw(v, std::vector<double>(x.begin() + off, x.begin() + off + v.raw_size())));
      off += v.raw_size();
    }
    return loss(args).item();
  };
  out.numeric = ad::finite_diff(f, flat, eps);
  out.rel_error = ad::relative_error(out.analytic, out.numeric);
  return out;
}

inline ad::Tensor random_real(ad::Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(ad::shape_numel(shape));
  for (double& x : v) x = u(rng);
  return ad::Tensor::real(std::move(shape), std::move(v));
}

inline ad::Tensor random_complex(ad::Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(2 * ad::shape_numel(shape));
  for (double& x : v) x = u(rng);
  return ad::Tensor::complex(std::move(shape), std::move(v));
}

// A real scalar that weights every output entry differently, so a gradient
// check sees each output coordinate.
inline ad::Tensor probe(const ad::Tensor& y, std::uint64_t seed = 99) {
  std::mt19937_64 rng(seed);
  ad::Tensor planes = y.is_complex() ? ad::as_planes(y) : y;
  return ad::sum(ad::mul(planes, random_real(planes.shape(), rng)));
}

}  // namespace rxprobe::testing
