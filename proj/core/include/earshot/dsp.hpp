#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace earshot {

/// Periodic Hann window, w[n] = 0.5 - 0.5 cos(2 pi n / N). Sums to 1 at hop N/2.
std::vector<double> hann_window(std::size_t length);

/// Kaiser-windowed sinc with unit DC gain at `cutoff` (fraction of Nyquist, <= 1).
/// Support is |t| < half_width / cutoff.
double windowed_sinc(double t, double cutoff, int half_width, double kaiser_beta = 9.0);

/// y[n] = sum_m x[m] h(n - delay - m): band-limited delay by a (possibly fractional)
/// number of samples. Integer delays reduce to an exact shift.
std::vector<double> fractional_delay(std::span<const double> x, double delay,
                                     std::size_t output_length, int half_width = 32);

/// Direct-form linear convolution, length a.size() + b.size() - 1.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

double energy(std::span<const double> x) noexcept;

/// Energy of `x` in [f_lo, f_hi] Hz, from a zero-padded power-of-two FFT.
double band_energy(std::span<const double> x, int sample_rate, double f_lo, double f_hi);

struct GccPhatResult {
  double lag = 0.0;   // samples; > 0 when `a` is delayed relative to `b`
  double peak = 0.0;  // normalized correlation at the peak
};

/// Generalized cross-correlation with phase transform, searched over |lag| <= max_lag,
/// refined by parabolic interpolation around the integer peak.
GccPhatResult gcc_phat(std::span<const double> a, std::span<const double> b, int max_lag);

}  // namespace earshot
