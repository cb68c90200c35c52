#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rxprobe::ad {

class Tape;

using Shape = std::vector<std::size_t>;
using cplx = std::complex<double>;

enum class DType { Real, Complex };

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// Immutable dense float64 tensor. Complex tensors store interleaved (re, im)
// pairs, so a complex tensor of shape S has the same memory layout as a real
// tensor of shape S + {2}.
//
// A tensor that is attached to a tape (node() >= 0) requires grad. Copies are
// cheap: the value buffer is shared.
class Tensor {
 public:
  Tensor();

  static Tensor zeros(Shape shape, DType dtype = DType::Real);
  static Tensor full(Shape shape, double value);
  static Tensor scalar(double value);
  static Tensor real(Shape shape, std::vector<double> values);
  // `interleaved` holds 2 * numel values.
  static Tensor complex(Shape shape, std::vector<double> interleaved);
  static Tensor complex(Shape shape, const std::vector<cplx>& values);

  const Shape& shape() const { return shape_; }
  std::size_t ndim() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t numel() const { return numel_; }
  DType dtype() const { return dtype_; }
  bool is_complex() const { return dtype_ == DType::Complex; }
  // Number of stored doubles (2 * numel for complex).
  std::size_t raw_size() const { return data_ ? data_->size() : 0; }
  bool defined() const { return static_cast<bool>(data_); }

  std::span<const double> data() const;
  double item() const;
  double at(std::size_t flat) const;
  cplx cat(std::size_t flat) const;
  std::vector<cplx> to_complex_vector() const;

  bool requires_grad() const { return tape_ != nullptr && node_ >= 0; }
  Tape* tape() const { return tape_; }
  int node() const { return node_; }

  // Same values, no tape attachment.
  Tensor detach() const;

 private:
  friend class Tape;

  Tensor(Shape shape, DType dtype, std::shared_ptr<const std::vector<double>> data);

  Shape shape_;
  std::size_t numel_ = 0;
  DType dtype_ = DType::Real;
  std::shared_ptr<const std::vector<double>> data_;
  Tape* tape_ = nullptr;
  int node_ = -1;
};

// Real/imaginary parts as owned real tensors (no tape).
Tensor real_values(const Tensor& z);
Tensor imag_values(const Tensor& z);

}  // namespace rxprobe::ad
