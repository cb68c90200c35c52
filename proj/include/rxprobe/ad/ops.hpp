#pragma once

#include <cstddef>
#include <vector>

#include "rxprobe/ad/tape.hpp"
#include "rxprobe/ad/tensor.hpp"

// Differentiable tensor operations. Every op records itself on the tape of
// its grad-requiring inputs; with no such input it is a plain computation.
//
// Complex tensors follow the "independent real and imaginary leaves"
// convention: the gradient stored for a complex tensor is (dL/dRe, dL/dIm).
// Mixing a real and a complex operand promotes to complex; the real operand
// then receives the real part of its complex gradient.
namespace rxprobe::ad {

// Elementwise binary ops with right-aligned (numpy-style) broadcasting.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor neg(const Tensor& x);
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double offset);

// Real-only elementwise ops.
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
Tensor sqrt(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor relu(const Tensor& x);
// Gradient is zero where the bound is active.
Tensor clamp_min(const Tensor& x, double floor);
Tensor clamp(const Tensor& x, double lo, double hi);
// log(1 + e^x), numerically stable.
Tensor softplus(const Tensor& x);

// Complex helpers.
Tensor abs2(const Tensor& z);
Tensor conj(const Tensor& z);
Tensor real_part(const Tensor& z);
Tensor imag_part(const Tensor& z);
Tensor make_complex(const Tensor& re, const Tensor& im);
Tensor to_complex(const Tensor& x);
// e^{j theta} for a real tensor theta.
Tensor expj(const Tensor& theta);
// Complex (...) viewed as real (..., 2) holding (re, im).
Tensor as_planes(const Tensor& z);

// Reductions.
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor sum_axis(const Tensor& x, std::size_t axis);

// Shape ops.
Tensor reshape(const Tensor& x, Shape shape);
Tensor index_select(const Tensor& x, std::size_t axis, const std::vector<std::size_t>& indices);
Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end);
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);

// (..., m, k) x (..., k, n). Leading batch dims must match, or one operand
// may be a plain matrix shared across the batch.
Tensor matmul(const Tensor& a, const Tensor& b);

// Unnormalized DFT matrix F[k][t] = exp(-j 2 pi k t / n).
Tensor dft_matrix(std::size_t n);
// DFT along the last axis via the precomputed matrix.
Tensor dft(const Tensor& x);

// 3x3 convolution, stride 1, zero "same" padding, NHWC layout.
// x: (batch, height, width, c_in); weight: (3, 3, c_in, c_out); bias: (c_out).
Tensor conv2d_3x3(const Tensor& x, const Tensor& weight, const Tensor& bias);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator-(const Tensor& x) { return neg(x); }
inline Tensor operator*(const Tensor& x, double s) { return scale(x, s); }
inline Tensor operator*(double s, const Tensor& x) { return scale(x, s); }
inline Tensor operator+(const Tensor& x, double s) { return add_scalar(x, s); }

}  // namespace rxprobe::ad
