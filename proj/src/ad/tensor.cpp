#include "rxprobe/ad/tensor.hpp"

#include <sstream>
#include <stdexcept>

namespace rxprobe::ad {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor() = default;

Tensor::Tensor(Shape shape, DType dtype, std::shared_ptr<const std::vector<double>> data)
    : shape_(std::move(shape)), numel_(shape_numel(shape_)), dtype_(dtype), data_(std::move(data)) {
  const std::size_t expected = numel_ * (dtype_ == DType::Complex ? 2 : 1);
  if (data_->size() != expected) {
    throw std::invalid_argument("tensor data length " + std::to_string(data_->size()) +
                                " does not match shape " + shape_str(shape_));
  }
}

Tensor Tensor::zeros(Shape shape, DType dtype) {
  const std::size_t n = shape_numel(shape) * (dtype == DType::Complex ? 2 : 1);
  return Tensor(std::move(shape), dtype, std::make_shared<const std::vector<double>>(n, 0.0));
}

Tensor Tensor::full(Shape shape, double value) {
  const std::size_t n = shape_numel(shape);
  return Tensor(std::move(shape), DType::Real, std::make_shared<const std::vector<double>>(n, value));
}

Tensor Tensor::scalar(double value) { return full({}, value); }

Tensor Tensor::real(Shape shape, std::vector<double> values) {
  return Tensor(std::move(shape), DType::Real, std::make_shared<const std::vector<double>>(std::move(values)));
}

Tensor Tensor::complex(Shape shape, std::vector<double> interleaved) {
  return Tensor(std::move(shape), DType::Complex,
                std::make_shared<const std::vector<double>>(std::move(interleaved)));
}

Tensor Tensor::complex(Shape shape, const std::vector<cplx>& values) {
  std::vector<double> raw(values.size() * 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    raw[2 * i] = values[i].real();
    raw[2 * i + 1] = values[i].imag();
  }
  return complex(std::move(shape), std::move(raw));
}

std::span<const double> Tensor::data() const {
  if (!data_) return {};
  return {data_->data(), data_->size()};
}

double Tensor::item() const {
  if (numel_ != 1 || is_complex()) throw std::invalid_argument("item() needs a real single-element tensor, got " + shape_str(shape_));
  return (*data_)[0];
}

double Tensor::at(std::size_t flat) const {
  if (is_complex()) throw std::invalid_argument("at() on complex tensor");
  return data_->at(flat);
}

cplx Tensor::cat(std::size_t flat) const {
  if (!is_complex()) return {data_->at(flat), 0.0};
  return {data_->at(2 * flat), data_->at(2 * flat + 1)};
}

std::vector<cplx> Tensor::to_complex_vector() const {
  std::vector<cplx> out(numel_);
  for (std::size_t i = 0; i < numel_; ++i) out[i] = cat(i);
  return out;
}

Tensor Tensor::detach() const {
  Tensor t = *this;
  t.tape_ = nullptr;
  t.node_ = -1;
  return t;
}

Tensor real_values(const Tensor& z) {
  if (!z.is_complex()) return z.detach();
  std::vector<double> out(z.numel());
  auto d = z.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d[2 * i];
  return Tensor::real(z.shape(), std::move(out));
}

Tensor imag_values(const Tensor& z) {
  std::vector<double> out(z.numel(), 0.0);
  if (z.is_complex()) {
    auto d = z.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = d[2 * i + 1];
  }
  return Tensor::real(z.shape(), std::move(out));
}

}  // namespace rxprobe::ad
