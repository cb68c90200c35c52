#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rxprobe/ad/tensor.hpp"
#include "rxprobe/link/signal.hpp"

namespace rxprobe::search {

constexpr std::size_t kAxes = 3;  // speed, delay spread, noise power

// x_hat = (x - min) / (max - min). Throws when min >= max.
double normalize(double x, double min, double max);
double denormalize(double x_hat, double min, double max);
ad::Tensor denormalize(const ad::Tensor& x_hat, double min, double max);

// One searched parameter. Bounds and lattice are in external units u; the
// simulator sees canonical = (u - unit_offset) / unit_scale.
struct Axis {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  std::vector<double> lattice;  // initial values
  double unit_scale = 1.0;
  double unit_offset = 0.0;

  void validate() const;
  double to_canonical(double u) const { return (u - unit_offset) / unit_scale; }
  ad::Tensor to_canonical(const ad::Tensor& u) const;
};

// Axes in order speed (m/s), delay spread (ns), noise power x_n (dBm). The
// noise axis is stored as x_n = -SNR, so the SNR range [0, 22] dB becomes
// x_n in [-22, 0].
struct SearchSpace {
  std::array<Axis, kAxes> axes;

  static SearchSpace defaults();
  // SNR-style constructor for the noise axis.
  static Axis noise_axis_from_snr(double snr_min, double snr_max, const std::vector<double>& snr_lattice);

  void validate() const;
  std::array<double, kAxes> normalize(const link::ScenarioParams& p) const;
  // Canonical scenario for a normalized point.
  link::ScenarioParams denormalize(const std::array<double, kAxes>& x_hat) const;
  bool contains(const link::ScenarioParams& p, double tol = 1e-9) const;
};

// Uniform draw from the lattice product, a pure function of (seed, episode).
link::ScenarioParams sample_initial(const SearchSpace& space, std::uint64_t seed, std::uint64_t episode);

}  // namespace rxprobe::search
