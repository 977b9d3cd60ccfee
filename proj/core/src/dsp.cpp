#include "earshot/dsp.hpp"

#include <algorithm>
#include <cmath>

#include "earshot/audio.hpp"
#include "earshot/fft.hpp"
#include "earshot/scene.hpp"

namespace earshot {

bool all_finite(std::span<const double> samples) noexcept {
  return std::all_of(samples.begin(), samples.end(), [](double v) { return std::isfinite(v); });
}

double peak_abs(std::span<const double> samples) noexcept {
  double peak = 0.0;
  for (double v : samples) peak = std::max(peak, std::abs(v));
  return peak;
}

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(n) / static_cast<double>(length));
  }
  return w;
}

double windowed_sinc(double t, double cutoff, int half_width, double kaiser_beta) {
  const double support = half_width / cutoff;
  if (std::abs(t) >= support) return 0.0;
  const double x = cutoff * t;
  const double sinc = x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x);
  const double r = t / support;
  const double kaiser = std::cyl_bessel_i(0.0, kaiser_beta * std::sqrt(1.0 - r * r)) /
                        std::cyl_bessel_i(0.0, kaiser_beta);
  return cutoff * sinc * kaiser;
}

std::vector<double> fractional_delay(std::span<const double> x, double delay,
                                     std::size_t output_length, int half_width) {
  std::vector<double> y(output_length, 0.0);
  const double whole = std::floor(delay);
  const double frac = delay - whole;
  const auto shift = static_cast<std::ptrdiff_t>(whole);
  const auto n_in = static_cast<std::ptrdiff_t>(x.size());
  if (frac == 0.0) {
    for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(output_length); ++n) {
      const auto m = n - shift;
      if (m >= 0 && m < n_in) y[static_cast<std::size_t>(n)] = x[static_cast<std::size_t>(m)];
    }
    return y;
  }
  // Taps depend only on the fractional part.
  std::vector<double> taps;
  for (int j = -half_width; j <= half_width; ++j) taps.push_back(windowed_sinc(j - frac, 1.0, half_width));
  for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(output_length); ++n) {
    double acc = 0.0;
    for (int j = -half_width; j <= half_width; ++j) {
      const auto m = n - shift - j;
      if (m >= 0 && m < n_in) acc += x[static_cast<std::size_t>(m)] * taps[static_cast<std::size_t>(j + half_width)];
    }
    y[static_cast<std::size_t>(n)] = acc;
  }
  return y;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> y(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) y[i + j] += ai * b[j];
  }
  return y;
}

double energy(std::span<const double> x) noexcept {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

double band_energy(std::span<const double> x, int sample_rate, double f_lo, double f_hi) {
  const std::size_t n = next_power_of_two(std::max<std::size_t>(x.size(), 2));
  std::vector<double> padded(n, 0.0);
  std::copy(x.begin(), x.end(), padded.begin());
  RealFft fft(n);
  std::vector<Complex> spec(fft.bins());
  fft.forward(padded, spec);
  double e = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n);
    if (f >= f_lo && f <= f_hi) e += std::norm(spec[k]);
  }
  return e;
}

GccPhatResult gcc_phat(std::span<const double> a, std::span<const double> b, int max_lag) {
  const std::size_t n = next_power_of_two(a.size() + b.size());
  std::vector<double> pa(n, 0.0), pb(n, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  RealFft fft(n);
  std::vector<Complex> sa(fft.bins()), sb(fft.bins());
  fft.forward(pa, sa);
  fft.forward(pb, sb);
  double total = 0.0;
  for (std::size_t k = 0; k < sa.size(); ++k) {
    const Complex cross = sa[k] * std::conj(sb[k]);
    const double mag = std::abs(cross);
    sa[k] = mag > 1e-20 ? cross / mag : Complex{};
    total += mag > 1e-20 ? 1.0 : 0.0;
  }
  std::vector<double> r(n);
  fft.inverse(sa, r);

  auto at = [&](std::ptrdiff_t lag) {
    const auto idx = lag >= 0 ? static_cast<std::size_t>(lag) : n - static_cast<std::size_t>(-lag);
    return r[idx];
  };
  const std::ptrdiff_t limit = std::min<std::ptrdiff_t>(max_lag, static_cast<std::ptrdiff_t>(n / 2) - 1);
  std::ptrdiff_t best = 0;
  for (std::ptrdiff_t lag = -limit; lag <= limit; ++lag) {
    if (at(lag) > at(best)) best = lag;
  }
  GccPhatResult result;
  result.lag = static_cast<double>(best);
  // r has unit-magnitude spectrum on `total` of n/2+1 bins; scale the peak to ~[0, 1].
  result.peak = total > 0.0 ? at(best) * static_cast<double>(n) / (2.0 * total) : 0.0;
  if (best > -limit && best < limit) {
    const double ym = at(best - 1), y0 = at(best), yp = at(best + 1);
    const double denom = ym - 2.0 * y0 + yp;
    if (denom < 0.0) result.lag += std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
  }
  return result;
}

}  // namespace earshot
