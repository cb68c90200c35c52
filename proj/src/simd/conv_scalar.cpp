#include <algorithm>
#include <vector>

#include "rxprobe/simd/conv_kernels.hpp"

namespace rxprobe::simd {
namespace {

void forward_scalar(const ConvDims& d, const double* in, const double* weight, const double* bias, double* out) {
  const std::size_t pw = d.width + 2, ph = d.height + 2;
  std::vector<double> acc(d.c_out);
  for (std::size_t b = 0; b < d.batch; ++b)
    for (std::size_t h = 0; h < d.height; ++h)
      for (std::size_t w = 0; w < d.width; ++w) {
        if (bias)
          std::copy_n(bias, d.c_out, acc.begin());
        else
          std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t kh = 0; kh < 3; ++kh)
          for (std::size_t kw = 0; kw < 3; ++kw) {
            const double* ip = in + ((b * ph + h + kh) * pw + w + kw) * d.c_in;
            const double* wp = weight + (kh * 3 + kw) * d.c_in * d.c_out;
            for (std::size_t ci = 0; ci < d.c_in; ++ci) {
              const double v = ip[ci];
              const double* wrow = wp + ci * d.c_out;
              for (std::size_t co = 0; co < d.c_out; ++co) acc[co] += v * wrow[co];
            }
          }
        std::copy(acc.begin(), acc.end(), out + ((b * d.height + h) * d.width + w) * d.c_out);
      }
}

void weight_grad_scalar(const ConvDims& d, const double* in, const double* grad_out, double* grad_weight,
                        double* grad_bias) {
  const std::size_t pw = d.width + 2, ph = d.height + 2;
  for (std::size_t b = 0; b < d.batch; ++b)
    for (std::size_t h = 0; h < d.height; ++h)
      for (std::size_t w = 0; w < d.width; ++w) {
        const double* g = grad_out + ((b * d.height + h) * d.width + w) * d.c_out;
        if (grad_bias)
          for (std::size_t co = 0; co < d.c_out; ++co) grad_bias[co] += g[co];
        for (std::size_t kh = 0; kh < 3; ++kh)
          for (std::size_t kw = 0; kw < 3; ++kw) {
            const double* ip = in + ((b * ph + h + kh) * pw + w + kw) * d.c_in;
            double* gw = grad_weight + (kh * 3 + kw) * d.c_in * d.c_out;
            for (std::size_t ci = 0; ci < d.c_in; ++ci) {
              const double v = ip[ci];
              double* grow = gw + ci * d.c_out;
              for (std::size_t co = 0; co < d.c_out; ++co) grow[co] += v * g[co];
            }
          }
      }
}

}  // namespace

const ConvKernels& scalar_kernels() {
  static const ConvKernels k{"scalar", &forward_scalar, &weight_grad_scalar};
  return k;
}

void pad_nhwc(const ConvDims& d, const double* in, double* out_padded) {
  const std::size_t pw = d.width + 2, ph = d.height + 2;
  std::fill_n(out_padded, d.padded_size(), 0.0);
  const std::size_t row = d.width * d.c_in;
  for (std::size_t b = 0; b < d.batch; ++b)
    for (std::size_t h = 0; h < d.height; ++h)
      std::copy_n(in + (b * d.height + h) * row, row, out_padded + ((b * ph + h + 1) * pw + 1) * d.c_in);
}

void crop_nhwc(const ConvDims& d, const double* in_padded, double* out) {
  const std::size_t pw = d.width + 2, ph = d.height + 2;
  const std::size_t row = d.width * d.c_in;
  for (std::size_t b = 0; b < d.batch; ++b)
    for (std::size_t h = 0; h < d.height; ++h)
      std::copy_n(in_padded + ((b * ph + h + 1) * pw + 1) * d.c_in, row, out + (b * d.height + h) * row);
}

}  // namespace rxprobe::simd
