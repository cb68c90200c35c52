#include "rxprobe/neural/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "rxprobe/ad/ops.hpp"
#include "rxprobe/link/rng.hpp"

namespace rxprobe::neural {

using ad::Tensor;

void ModelConfig::validate() const {
  if (n_resblocks < 1) throw std::invalid_argument("model: n_resblocks must be >= 1");
  if (channel_width < 1) throw std::invalid_argument("model: channel_width must be >= 1");
  if (bits_out != 2 && bits_out != 4 && bits_out != 6) throw std::invalid_argument("model: bits_out must be 2, 4 or 6");
}

std::size_t ModelConfig::parameter_count() const {
  const std::size_t c = channel_width;
  const std::size_t in = 9 * kInputPlanes * c + c;
  const std::size_t block = 2 * (9 * c * c + c);
  const std::size_t out = 9 * c * bits_out + bits_out;
  return in + n_resblocks * block + out;
}

std::vector<ad::Shape> NeuralReceiver::param_shapes(const ModelConfig& cfg) {
  const std::size_t c = cfg.channel_width;
  std::vector<ad::Shape> s{{3, 3, kInputPlanes, c}, {c}};
  for (std::size_t b = 0; b < cfg.n_resblocks; ++b) {
    s.push_back({3, 3, c, c});
    s.push_back({c});
    s.push_back({3, 3, c, c});
    s.push_back({c});
  }
  s.push_back({3, 3, c, cfg.bits_out});
  s.push_back({cfg.bits_out});
  return s;
}

std::vector<std::string> NeuralReceiver::param_names() const {
  std::vector<std::string> n{"input.weight", "input.bias"};
  for (std::size_t b = 0; b < config_.n_resblocks; ++b) {
    const std::string p = "block" + std::to_string(b);
    for (const char* suffix : {".conv1.weight", ".conv1.bias", ".conv2.weight", ".conv2.bias"}) n.push_back(p + suffix);
  }
  n.push_back("output.weight");
  n.push_back("output.bias");
  return n;
}

NeuralReceiver::NeuralReceiver(const ModelConfig& config) : config_(config) {
  config_.validate();
  // He-normal weights; the second conv of each block starts small so every
  // block begins close to the identity. Biases start at zero.
  std::mt19937_64 rng(link::derive_seed(config_.init_seed, link::Stream::ModelInit));
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto shapes = param_shapes(config_);
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const auto& s = shapes[i];
    std::vector<double> v(ad::shape_numel(s), 0.0);
    if (s.size() == 4) {
      const double fan_in = 9.0 * static_cast<double>(s[2]);
      double std_dev = std::sqrt(2.0 / fan_in);
      const bool second_conv = i >= 2 && i + 2 < shapes.size() && ((i - 2) / 2) % 2 == 1;
      if (second_conv) std_dev *= 0.1;
      for (double& x : v) x = std_dev * normal(rng);
    }
    params_.push_back(Tensor::real(s, std::move(v)));
  }
}

NeuralReceiver::NeuralReceiver(const ModelConfig& config, std::vector<Tensor> params)
    : config_(config), params_(std::move(params)) {
  config_.validate();
  const auto shapes = param_shapes(config_);
  if (params_.size() != shapes.size()) {
    throw std::invalid_argument("NeuralReceiver: expected " + std::to_string(shapes.size()) + " parameter tensors, got " +
                                std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < shapes.size(); ++i)
    if (params_[i].shape() != shapes[i] || params_[i].is_complex()) {
      throw std::invalid_argument("NeuralReceiver: parameter " + std::to_string(i) + " has shape " +
                                  ad::shape_str(params_[i].shape()) + ", expected " + ad::shape_str(shapes[i]));
    }
}

std::size_t NeuralReceiver::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.numel();
  return n;
}

Tensor NeuralReceiver::forward(const Tensor& features) const { return forward(features, params_); }

Tensor NeuralReceiver::forward(const Tensor& x, const std::vector<Tensor>& p) const {
  if (x.ndim() != 4 || x.dim(3) != kInputPlanes || x.is_complex()) {
    throw std::invalid_argument("NeuralReceiver::forward: features must be real (batch, symbols, subcarriers, 6), got " +
                                ad::shape_str(x.shape()));
  }
  if (p.size() != params_.size()) throw std::invalid_argument("NeuralReceiver::forward: parameter list size mismatch");
  Tensor h = ad::conv2d_3x3(x, p[0], p[1]);
  for (std::size_t b = 0; b < config_.n_resblocks; ++b) {
    const std::size_t k = 2 + 4 * b;
    const Tensor inner = ad::conv2d_3x3(ad::relu(h), p[k], p[k + 1]);
    h = ad::add(h, ad::conv2d_3x3(ad::relu(inner), p[k + 2], p[k + 3]));
  }
  return ad::conv2d_3x3(ad::relu(h), p[p.size() - 2], p[p.size() - 1]);
}

Tensor make_features(const Tensor& rx, const Tensor& pilots, const Tensor& h_ls) {
  if (rx.shape() != pilots.shape() || rx.shape() != h_ls.shape() || rx.ndim() != 3) {
    throw std::invalid_argument("make_features: grids must share a (batch, symbols, subcarriers) shape, got " +
                                ad::shape_str(rx.shape()) + ", " + ad::shape_str(pilots.shape()) + ", " +
                                ad::shape_str(h_ls.shape()));
  }
  const Tensor planes = ad::concat({ad::as_planes(rx), ad::as_planes(pilots), ad::as_planes(h_ls)}, 3);
  return ad::scale(planes, std::sqrt(2.0));
}

}  // namespace rxprobe::neural
