#include "rxprobe/ad/finite_diff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rxprobe::ad {

std::vector<double> finite_diff(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
                                double eps) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double orig = point[i];
    point[i] = orig + eps;
    const double up = f(point);
    point[i] = orig - eps;
    const double down = f(point);
    point[i] = orig;
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

double relative_error(std::span<const double> a, std::span<const double> b, double floor) {
  if (a.size() != b.size()) throw std::invalid_argument("relative_error: size mismatch");
  double diff = 0, scale = floor;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return diff / scale;
}

}  // namespace rxprobe::ad
