#include "earshot/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "earshot/dsp.hpp"
#include "earshot/error.hpp"

namespace earshot {

std::vector<double> resample(std::span<const double> x, int from_rate, int to_rate,
                             int half_width) {
  if (from_rate <= 0 || to_rate <= 0) throw Error(Errc::kRateMismatch, "sample rates must be > 0");
  if (from_rate == to_rate) return {x.begin(), x.end()};

  const long g = std::gcd(from_rate, to_rate);
  const long up = to_rate / g;    // L
  const long down = from_rate / g;  // M
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(x.size()) * to_rate / from_rate));
  // Anti-aliasing when decimating.
  const double cutoff = std::min(1.0, static_cast<double>(up) / static_cast<double>(down));
  const double support = half_width / cutoff;
  const auto n_in = static_cast<long>(x.size());

  std::vector<double> y(n_out, 0.0);
  for (std::size_t n = 0; n < n_out; ++n) {
    // Input position n * M / L, split exactly into integer and fractional parts.
    const long num = static_cast<long>(n) * down;
    const long base = num / up;
    const double frac = static_cast<double>(num % up) / static_cast<double>(up);
    const long lo = base - static_cast<long>(std::ceil(support));
    const long hi = base + static_cast<long>(std::ceil(support)) + 1;
    double acc = 0.0;
    for (long m = std::max(lo, 0L); m <= std::min(hi, n_in - 1); ++m) {
      acc += x[static_cast<std::size_t>(m)] *
             windowed_sinc(static_cast<double>(base - m) + frac, cutoff, half_width);
    }
    y[n] = acc;
  }
  return y;
}

}  // namespace earshot
