// AVX2 + FMA variant. This translation unit is the only one built with
// -mavx2 -mfma; it is reached exclusively through the dispatch table after a
// runtime CPU check.
#include <immintrin.h>

#include "rxprobe/simd/conv_kernels.hpp"

namespace rxprobe::simd {
namespace {

// P output positions (consecutive along width) x V vectors of 4 output
// channels, starting at channel co.
template <int P, int V>
inline void forward_tile(const ConvDims& d, const double* in_row0, std::size_t pw, const double* weight,
                         const double* bias, std::size_t co, double* out) {
  __m256d acc[P][V];
  for (int v = 0; v < V; ++v) {
    const __m256d b = bias ? _mm256_loadu_pd(bias + co + 4 * v) : _mm256_setzero_pd();
    for (int p = 0; p < P; ++p) acc[p][v] = b;
  }
  const std::size_t cin = d.c_in, cout = d.c_out;
  for (std::size_t kh = 0; kh < 3; ++kh) {
    for (std::size_t kw = 0; kw < 3; ++kw) {
      const double* ip = in_row0 + (kh * pw + kw) * cin;
      const double* wp = weight + (kh * 3 + kw) * cin * cout + co;
      for (std::size_t ci = 0; ci < cin; ++ci) {
        __m256d wv[V];
        for (int v = 0; v < V; ++v) wv[v] = _mm256_loadu_pd(wp + ci * cout + 4 * v);
        for (int p = 0; p < P; ++p) {
          const __m256d x = _mm256_broadcast_sd(ip + p * cin + ci);
          for (int v = 0; v < V; ++v) acc[p][v] = _mm256_fmadd_pd(x, wv[v], acc[p][v]);
        }
      }
    }
  }
  for (int p = 0; p < P; ++p)
    for (int v = 0; v < V; ++v) _mm256_storeu_pd(out + p * cout + co + 4 * v, acc[p][v]);
}

inline void forward_tail_channel(const ConvDims& d, const double* in_row0, std::size_t pw, const double* weight,
                                 const double* bias, std::size_t co, double* out) {
  double acc = bias ? bias[co] : 0.0;
  for (std::size_t kh = 0; kh < 3; ++kh)
    for (std::size_t kw = 0; kw < 3; ++kw) {
      const double* ip = in_row0 + (kh * pw + kw) * d.c_in;
      const double* wp = weight + (kh * 3 + kw) * d.c_in * d.c_out + co;
      for (std::size_t ci = 0; ci < d.c_in; ++ci) acc += ip[ci] * wp[ci * d.c_out];
    }
  out[co] = acc;
}

template <int P>
inline void forward_positions(const ConvDims& d, const double* in_row0, std::size_t pw, const double* weight,
                              const double* bias, double* out) {
  std::size_t co = 0;
  for (; co + 8 <= d.c_out; co += 8) forward_tile<P, 2>(d, in_row0, pw, weight, bias, co, out);
  for (; co + 4 <= d.c_out; co += 4) forward_tile<P, 1>(d, in_row0, pw, weight, bias, co, out);
  for (; co < d.c_out; ++co)
    for (int p = 0; p < P; ++p) forward_tail_channel(d, in_row0 + p * d.c_in, pw, weight, bias, co, out + p * d.c_out);
}

void forward_avx2(const ConvDims& d, const double* in, const double* weight, const double* bias, double* out) {
  const std::size_t pw = d.width + 2, ph = d.height + 2;
  for (std::size_t b = 0; b < d.batch; ++b)
    for (std::size_t h = 0; h < d.height; ++h) {
      const double* row = in + (b * ph + h) * pw * d.c_in;
      double* orow = out + (b * d.height + h) * d.width * d.c_out;
      std::size_t w = 0;
      for (; w + 4 <= d.width; w += 4) forward_positions<4>(d, row + w * d.c_in, pw, weight, bias, orow + w * d.c_out);
      for (; w < d.width; ++w) forward_positions<1>(d, row + w * d.c_in, pw, weight, bias, orow + w * d.c_out);
    }
}

// C input channels x V vectors of output channels, reduced over one row of
// `width` output positions.
template <int C, int V>
inline void weight_grad_tile(std::size_t width, std::size_t cin, std::size_t cout, const double* ip, const double* gp,
                             double* gw, std::size_t ci, std::size_t co) {
  __m256d acc[C][V];
  for (int c = 0; c < C; ++c)
    for (int v = 0; v < V; ++v) acc[c][v] = _mm256_loadu_pd(gw + (ci + c) * cout + co + 4 * v);
  for (std::size_t w = 0; w < width; ++w) {
    __m256d g[V];
    for (int v = 0; v < V; ++v) g[v] = _mm256_loadu_pd(gp + w * cout + co + 4 * v);
    for (int c = 0; c < C; ++c) {
      const __m256d x = _mm256_broadcast_sd(ip + w * cin + ci + c);
      for (int v = 0; v < V; ++v) acc[c][v] = _mm256_fmadd_pd(x, g[v], acc[c][v]);
    }
  }
  for (int c = 0; c < C; ++c)
    for (int v = 0; v < V; ++v) _mm256_storeu_pd(gw + (ci + c) * cout + co + 4 * v, acc[c][v]);
}

template <int C>
inline void weight_grad_channels(std::size_t width, std::size_t cin, std::size_t cout, const double* ip,
                                 const double* gp, double* gw, std::size_t ci) {
  std::size_t co = 0;
  for (; co + 8 <= cout; co += 8) weight_grad_tile<C, 2>(width, cin, cout, ip, gp, gw, ci, co);
  for (; co + 4 <= cout; co += 4) weight_grad_tile<C, 1>(width, cin, cout, ip, gp, gw, ci, co);
  for (; co < cout; ++co)
    for (int c = 0; c < C; ++c) {
      double s = gw[(ci + c) * cout + co];
      for (std::size_t w = 0; w < width; ++w) s += ip[w * cin + ci + c] * gp[w * cout + co];
      gw[(ci + c) * cout + co] = s;
    }
}

void weight_grad_avx2(const ConvDims& d, const double* in, const double* grad_out, double* grad_weight,
                      double* grad_bias) {
  const std::size_t pw = d.width + 2, ph = d.height + 2;
  for (std::size_t b = 0; b < d.batch; ++b)
    for (std::size_t h = 0; h < d.height; ++h) {
      const double* gp = grad_out + (b * d.height + h) * d.width * d.c_out;
      if (grad_bias)
        for (std::size_t w = 0; w < d.width; ++w)
          for (std::size_t co = 0; co < d.c_out; ++co) grad_bias[co] += gp[w * d.c_out + co];
      for (std::size_t kh = 0; kh < 3; ++kh)
        for (std::size_t kw = 0; kw < 3; ++kw) {
          const double* ip = in + ((b * ph + h + kh) * pw + kw) * d.c_in;
          double* gw = grad_weight + (kh * 3 + kw) * d.c_in * d.c_out;
          std::size_t ci = 0;
          for (; ci + 4 <= d.c_in; ci += 4) weight_grad_channels<4>(d.width, d.c_in, d.c_out, ip, gp, gw, ci);
          for (; ci < d.c_in; ++ci) weight_grad_channels<1>(d.width, d.c_in, d.c_out, ip, gp, gw, ci);
        }
    }
}

}  // namespace

namespace detail {
const ConvKernels& avx2_kernels_unchecked() {
  static const ConvKernels k{"avx2", &forward_avx2, &weight_grad_avx2};
  return k;
}
}  // namespace detail

}  // namespace rxprobe::simd
