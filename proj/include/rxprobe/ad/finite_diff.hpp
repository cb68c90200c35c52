#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rxprobe::ad {

// Central-difference gradient of a scalar function of a flat coordinate
// vector: (f(x + eps e_i) - f(x - eps e_i)) / (2 eps) for every i.
std::vector<double> finite_diff(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
                                double eps);

// max_i |a_i - b_i| / max(|a|_inf, |b|_inf, floor)
double relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-12);

}  // namespace rxprobe::ad
