#pragma once

#include <cstddef>
#include <string_view>

// Inner loops of the 3x3 "same" convolution. Every variant computes the same
// sums; SIMD variants may differ from the scalar reference only by rounding
// (FMA contraction and accumulation order).
namespace rxprobe::simd {

struct ConvDims {
  std::size_t batch = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t c_in = 0;
  std::size_t c_out = 0;

  std::size_t padded_size() const { return batch * (height + 2) * (width + 2) * c_in; }
  std::size_t out_size() const { return batch * height * width * c_out; }
  std::size_t weight_size() const { return 9 * c_in * c_out; }
};

// out[b,h,w,co] = bias[co] + sum_{kh,kw,ci} in_padded[b,h+kh,w+kw,ci] * weight[kh,kw,ci,co]
// `in_padded` has shape (batch, height+2, width+2, c_in) with a zero border.
// `bias` may be nullptr.
using ConvForwardFn = void (*)(const ConvDims& dims, const double* in_padded, const double* weight, const double* bias,
                               double* out);

// grad_weight[kh,kw,ci,co] += sum_{b,h,w} in_padded[b,h+kh,w+kw,ci] * grad_out[b,h,w,co]
// grad_bias[co] += sum_{b,h,w} grad_out[b,h,w,co]   (skipped when nullptr)
using ConvWeightGradFn = void (*)(const ConvDims& dims, const double* in_padded, const double* grad_out,
                                  double* grad_weight, double* grad_bias);

struct ConvKernels {
  std::string_view name;
  ConvForwardFn forward = nullptr;
  ConvWeightGradFn weight_grad = nullptr;
};

const ConvKernels& scalar_kernels();
// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const ConvKernels* avx2_kernels();

// Chosen once per process: AVX2 when available, unless the environment
// variable RXPROBE_SIMD=scalar forces the reference path.
const ConvKernels& active_kernels();

bool cpu_supports_avx2_fma();

// Copies an NHWC tensor into a zero-bordered (height+2, width+2) buffer.
void pad_nhwc(const ConvDims& dims, const double* in, double* out_padded);
// Drops the border of a padded buffer: the inverse of pad_nhwc.
void crop_nhwc(const ConvDims& dims, const double* in_padded, double* out);

namespace detail {
const ConvKernels& avx2_kernels_unchecked();
}

}  // namespace rxprobe::simd
