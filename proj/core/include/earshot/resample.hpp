#pragma once

#include <span>
#include <vector>

namespace earshot {

/// Rational-factor windowed-sinc resampling from `from_rate` to `to_rate`.
/// Output length is round(n * to_rate / from_rate). Equal rates copy through.
std::vector<double> resample(std::span<const double> x, int from_rate, int to_rate,
                             int half_width = 32);

}  // namespace earshot
