#pragma once

// Straightforward reference implementations used to check the library. Nothing here
// calls into earshot's DSP code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

inline std::vector<std::complex<double>> dft(std::span<const double> x, std::size_t n) {
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{};
    for (std::size_t m = 0; m < std::min(n, x.size()); ++m) {
      const double a = -2.0 * kPi * static_cast<double>((k * m) % n) / static_cast<double>(n);
      acc += x[m] * std::complex<double>(std::cos(a), std::sin(a));
    }
    out[k] = acc;
  }
  return out;
}

inline std::vector<double> idft_real(std::span<const std::complex<double>> X) {
  const std::size_t n = X.size();
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    std::complex<double> acc{};
    for (std::size_t k = 0; k < n; ++k) {
      const double a = 2.0 * kPi * static_cast<double>((k * m) % n) / static_cast<double>(n);
      acc += X[k] * std::complex<double>(std::cos(a), std::sin(a));
    }
    out[m] = acc.real() / static_cast<double>(n);
  }
  return out;
}

/// Energy of x between f_lo and f_hi (Hz), one DFT bin at a time over the full length.
inline double band_energy(std::span<const double> x, int sample_rate, double f_lo, double f_hi) {
  const std::size_t n = x.size();
  const auto k_lo = static_cast<std::size_t>(std::ceil(f_lo * n / sample_rate));
  const auto k_hi = static_cast<std::size_t>(std::floor(f_hi * n / sample_rate));
  double total = 0.0;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    // Rotate a unit phasor instead of calling cos/sin per sample.
    const double a = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    const std::complex<double> step(std::cos(a), std::sin(a));
    std::complex<double> w(1.0, 0.0), acc{};
    for (std::size_t m = 0; m < n; ++m) {
      acc += x[m] * w;
      w *= step;
      if ((m & 1023) == 1023) w /= std::abs(w);
    }
    total += std::norm(acc);
  }
  return 2.0 * total / static_cast<double>(n);
}

inline double sinc(double t) { return t == 0.0 ? 1.0 : std::sin(kPi * t) / (kPi * t); }

/// Blackman-windowed sinc fractional delay, evaluated directly.
inline std::vector<double> fractional_delay(std::span<const double> x, double delay, std::size_t out_len,
                                            int half_width = 64) {
  std::vector<double> y(out_len, 0.0);
  for (std::size_t n = 0; n < out_len; ++n) {
    const double centre = static_cast<double>(n) - delay;
    const auto m_lo = static_cast<long>(std::ceil(centre - half_width));
    const auto m_hi = static_cast<long>(std::floor(centre + half_width));
    double acc = 0.0;
    for (long m = std::max(0L, m_lo); m <= m_hi && m < static_cast<long>(x.size()); ++m) {
      const double t = centre - static_cast<double>(m);
      const double u = (t + half_width) / (2.0 * half_width);
      const double w = 0.42 - 0.5 * std::cos(2.0 * kPi * u) + 0.08 * std::cos(4.0 * kPi * u);
      acc += x[static_cast<std::size_t>(m)] * sinc(t) * w;
    }
    y[n] = acc;
  }
  return y;
}

/// Gaussian white noise low-passed at `cutoff` (fraction of the sample rate) by a
/// 255-tap Blackman FIR, scaled to peak 0.5.
inline std::vector<double> bandlimited_noise(std::size_t n, double cutoff, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr int kTaps = 255;
  std::vector<double> white(n + kTaps);
  for (auto& v : white) v = normal(rng);
  std::vector<double> h(kTaps);
  for (int i = 0; i < kTaps; ++i) {
    const double t = i - (kTaps - 1) / 2.0;
    const double w = 0.42 - 0.5 * std::cos(2.0 * kPi * i / (kTaps - 1)) + 0.08 * std::cos(4.0 * kPi * i / (kTaps - 1));
    h[static_cast<std::size_t>(i)] = 2.0 * cutoff * sinc(2.0 * cutoff * t) * w;
  }
  std::vector<double> y(n, 0.0);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < kTaps; ++j) acc += h[static_cast<std::size_t>(j)] * white[i + kTaps - 1 - static_cast<std::size_t>(j)];
    y[i] = acc;
    peak = std::max(peak, std::abs(acc));
  }
  for (auto& v : y) v *= 0.5 / peak;
  return y;
}

/// Integer lag maximizing sum_n a[n + lag] b[n] over |lag| <= max_lag, refined by a parabola.
inline double xcorr_peak_lag(std::span<const double> a, std::span<const double> b, int max_lag) {
  auto corr = [&](int lag) {
    double acc = 0.0;
    for (std::size_t n = 0; n < b.size(); ++n) {
      const long i = static_cast<long>(n) + lag;
      if (i >= 0 && i < static_cast<long>(a.size())) acc += a[static_cast<std::size_t>(i)] * b[n];
    }
    return acc;
  };
  int best = -max_lag;
  double best_v = corr(best);
  for (int lag = -max_lag + 1; lag <= max_lag; ++lag) {
    const double v = corr(lag);
    if (v > best_v) {
      best_v = v;
      best = lag;
    }
  }
  const double ym = corr(best - 1), yp = corr(best + 1);
  const double denom = ym - 2.0 * best_v + yp;
  return denom < 0.0 ? best + 0.5 * (ym - yp) / denom : best;
}

inline double woodworth_itd_seconds(double lateral_rad, double radius, double c) {
  return radius * (lateral_rad + std::sin(lateral_rad)) / c;
}

inline double rms(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(x.size()));
}

inline double snr_db(std::span<const double> reference, std::span<const double> test) {
  double sig = 0.0, err = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    sig += reference[i] * reference[i];
    err += (reference[i] - test[i]) * (reference[i] - test[i]);
  }
  return 10.0 * std::log10(sig / std::max(err, 1e-300));
}

}  // namespace oracle
