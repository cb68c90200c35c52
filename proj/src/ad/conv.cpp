#include <memory>
#include <stdexcept>
#include <vector>

#include "rxprobe/ad/ops.hpp"
#include "rxprobe/simd/conv_kernels.hpp"

namespace rxprobe::ad {

Tensor conv2d_3x3(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  if (!x.defined() || !weight.defined() || !bias.defined()) throw std::invalid_argument("conv2d_3x3: undefined operand");
  if (x.is_complex() || weight.is_complex() || bias.is_complex()) {
    throw std::invalid_argument("conv2d_3x3: operands must be real");
  }
  if (x.ndim() != 4 || weight.ndim() != 4 || weight.dim(0) != 3 || weight.dim(1) != 3 || weight.dim(2) != x.dim(3) ||
      bias.ndim() != 1 || bias.dim(0) != weight.dim(3)) {
    throw std::invalid_argument("conv2d_3x3: incompatible shapes x=" + shape_str(x.shape()) +
                                " weight=" + shape_str(weight.shape()) + " bias=" + shape_str(bias.shape()));
  }
  const simd::ConvDims dims{x.dim(0), x.dim(1), x.dim(2), x.dim(3), weight.dim(3)};
  const simd::ConvKernels& kernels = simd::active_kernels();

  auto padded = std::make_shared<std::vector<double>>(dims.padded_size());
  simd::pad_nhwc(dims, x.data().data(), padded->data());
  std::vector<double> out(dims.out_size());
  kernels.forward(dims, padded->data(), weight.data().data(), bias.data().data(), out.data());

  Tensor result = Tensor::real({dims.batch, dims.height, dims.width, dims.c_out}, std::move(out));
  if (!x.requires_grad() && !weight.requires_grad() && !bias.requires_grad()) return result;

  Tensor wc = weight.detach();
  return Tape::record(
      "conv2d_3x3", std::move(result), {&x, &weight, &bias},
      [dims, padded, wc, &kernels](std::span<const double> g, std::span<double* const> gin) {
        if (gin[0]) {
          // d/dx is a convolution of grad_out with the spatially flipped,
          // channel-transposed kernel.
          const simd::ConvDims back{dims.batch, dims.height, dims.width, dims.c_out, dims.c_in};
          const double* w = wc.data().data();
          std::vector<double> wt(back.weight_size());
          for (std::size_t kh = 0; kh < 3; ++kh)
            for (std::size_t kw = 0; kw < 3; ++kw)
              for (std::size_t ci = 0; ci < dims.c_in; ++ci)
                for (std::size_t co = 0; co < dims.c_out; ++co)
                  wt[(((2 - kh) * 3 + (2 - kw)) * dims.c_out + co) * dims.c_in + ci] =
                      w[((kh * 3 + kw) * dims.c_in + ci) * dims.c_out + co];
          std::vector<double> gpad(back.padded_size());
          simd::pad_nhwc(back, g.data(), gpad.data());
          std::vector<double> gx(back.out_size());
          kernels.forward(back, gpad.data(), wt.data(), nullptr, gx.data());
          for (std::size_t i = 0; i < gx.size(); ++i) gin[0][i] += gx[i];
        }
        if (gin[1] || gin[2]) {
          std::vector<double> gw;
          double* gw_ptr = gin[1];
          if (!gw_ptr) {
            gw.assign(dims.weight_size(), 0.0);
            gw_ptr = gw.data();
          }
          kernels.weight_grad(dims, padded->data(), g.data(), gw_ptr, gin[2]);
        }
      });
}

}  // namespace rxprobe::ad
