#include "rxprobe/search/space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rxprobe/ad/ops.hpp"
#include "rxprobe/link/rng.hpp"

namespace rxprobe::search {

namespace {

void check_bounds(double min, double max) {
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
    throw std::invalid_argument("normalization bounds must be finite with min < max");
  }
}

std::vector<double> arithmetic(double start, double step, double stop) {
  std::vector<double> v;
  for (int i = 0; start + i * step <= stop + 1e-9; ++i) v.push_back(start + i * step);
  return v;
}

}  // namespace

double normalize(double x, double min, double max) {
  check_bounds(min, max);
  return (x - min) / (max - min);
}

double denormalize(double x_hat, double min, double max) {
  check_bounds(min, max);
  return x_hat * (max - min) + min;
}

ad::Tensor denormalize(const ad::Tensor& x_hat, double min, double max) {
  check_bounds(min, max);
  return ad::add_scalar(ad::scale(x_hat, max - min), min);
}

void Axis::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
    throw std::invalid_argument("search axis '" + name + "': bounds must be finite with min < max");
  }
  if (!(unit_scale > 0.0) || !std::isfinite(unit_offset)) {
    throw std::invalid_argument("search axis '" + name + "': unit map must be strictly increasing");
  }
  if (lattice.empty()) throw std::invalid_argument("search axis '" + name + "': empty initial lattice");
  for (double v : lattice)
    if (v < min || v > max) {
      throw std::invalid_argument("search axis '" + name + "': lattice value " + std::to_string(v) +
                                  " outside bounds");
    }
}

ad::Tensor Axis::to_canonical(const ad::Tensor& u) const {
  const ad::Tensor shifted = unit_offset == 0.0 ? u : ad::add_scalar(u, -unit_offset);
  return unit_scale == 1.0 ? shifted : ad::scale(shifted, 1.0 / unit_scale);
}

Axis SearchSpace::noise_axis_from_snr(double snr_min, double snr_max, const std::vector<double>& snr_lattice) {
  Axis a{"noise_dbm", -snr_max, -snr_min, {}, 1.0, 0.0};
  for (auto it = snr_lattice.rbegin(); it != snr_lattice.rend(); ++it) a.lattice.push_back(-*it);
  return a;
}

SearchSpace SearchSpace::defaults() {
  SearchSpace s;
  s.axes[0] = Axis{"speed", 0.0, 30.0, arithmetic(0, 1, 30)};
  std::vector<double> delays = arithmetic(10, 10, 380);
  delays.push_back(400);
  s.axes[1] = Axis{"delay_spread", 10.0, 400.0, delays};
  s.axes[2] = noise_axis_from_snr(0.0, 22.0, {5, 10, 15, 20});
  return s;
}

void SearchSpace::validate() const {
  for (const auto& a : axes) a.validate();
}

std::array<double, kAxes> SearchSpace::normalize(const link::ScenarioParams& p) const {
  // Canonical -> external is u = canonical * scale + offset.
  const std::array<double, kAxes> c{p.speed_mps, p.delay_spread_ns, p.noise_dbm};
  std::array<double, kAxes> out{};
  for (std::size_t i = 0; i < kAxes; ++i) {
    const double u = c[i] * axes[i].unit_scale + axes[i].unit_offset;
    out[i] = search::normalize(u, axes[i].min, axes[i].max);
  }
  return out;
}

link::ScenarioParams SearchSpace::denormalize(const std::array<double, kAxes>& x_hat) const {
  std::array<double, kAxes> c{};
  for (std::size_t i = 0; i < kAxes; ++i) c[i] = axes[i].to_canonical(search::denormalize(x_hat[i], axes[i].min, axes[i].max));
  return {c[0], c[1], c[2]};
}

bool SearchSpace::contains(const link::ScenarioParams& p, double tol) const {
  const auto n = normalize(p);
  return std::all_of(n.begin(), n.end(), [tol](double v) { return v >= -tol && v <= 1.0 + tol; });
}

link::ScenarioParams sample_initial(const SearchSpace& space, std::uint64_t seed, std::uint64_t episode) {
  const link::CounterRng rng(link::derive_seed(seed, link::Stream::EpisodeStart, episode));
  std::array<double, kAxes> c{};
  for (std::size_t i = 0; i < kAxes; ++i) {
    const auto& lat = space.axes[i].lattice;
    const auto k = std::min(lat.size() - 1, static_cast<std::size_t>(rng.uniform(i) * static_cast<double>(lat.size())));
    c[i] = space.axes[i].to_canonical(lat[k]);
  }
  return {c[0], c[1], c[2]};
}

}  // namespace rxprobe::search
