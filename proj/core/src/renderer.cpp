#include "earshot/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "earshot/dsp.hpp"
#include "earshot/error.hpp"
#include "earshot/scene.hpp"

namespace earshot {
namespace {

// Samples of slack kept in every frame's residual shift so zero-phase responses
// ring into the frame instead of wrapping around it. Capped at half the zero padding.
constexpr double kResidualMargin = 32.0;

void check_frame(const TransferField& field, std::size_t frame) {
  if (!field.derived()) throw Error(Errc::kShapeMismatch, "transfer field is not derived");
  if (frame >= field.frames()) {
    throw Error(Errc::kShapeMismatch, "frame " + std::to_string(frame) + " outside field of " +
                                          std::to_string(field.frames()) + " frames");
  }
}

}  // namespace

void FramePlan::validate() const {
  if (frame_length < 2 || frame_length % 2 != 0) {
    throw Error(Errc::kPlanMismatch, "frame length must be even and >= 2");
  }
  if (!is_power_of_two(fft_size) || fft_size < frame_length) {
    throw Error(Errc::kPlanMismatch, "FFT size must be a power of two >= frame length");
  }
  if (hop != frame_length / 2) {
    throw Error(Errc::kPlanMismatch, "Hann overlap-add needs hop == frame_length / 2");
  }
}

std::size_t FramePlan::frame_count(std::size_t samples) const {
  if (samples == 0) return 1;
  return (samples - 1) / hop + 2;
}

std::ptrdiff_t FramePlan::frame_start(std::size_t frame) const {
  return static_cast<std::ptrdiff_t>(frame * hop) - static_cast<std::ptrdiff_t>(frame_length - hop);
}

FramePlan FramePlan::with_pad_for(const TransferField& field) const {
  FramePlan p = *this;
  p.pad = static_cast<std::size_t>(std::ceil(field.max_shift()));
  return p;
}

void apply_transfer_half(std::span<const Complex> half_spectrum, const TransferField& field,
                         std::size_t frame, Ear ear, double offset, std::span<Complex> out) {
  check_frame(field, frame);
  const std::size_t bins = field.bins();
  if (half_spectrum.size() != bins || out.size() != bins) {
    throw Error(Errc::kShapeMismatch, "half spectrum must have K/2 + 1 = " + std::to_string(bins) + " bins");
  }
  const double w_step = 2.0 * kPi / static_cast<double>(field.fft_size());
  std::fill(out.begin(), out.end(), Complex{});
  for (std::size_t c = 0; c < field.channels(); ++c) {
    const auto scale = field.scale(frame, ear, c);
    const auto shift = field.shift(frame, ear, c);
    for (std::size_t k = 0; k < bins; ++k) {
      const double phase = -w_step * static_cast<double>(k) * (shift[k] - offset);
      out[k] += scale[k] * std::polar(1.0, phase) * half_spectrum[k];
    }
  }
  // DC and Nyquist of a real signal's spectrum are real.
  out.front() = Complex(out.front().real(), 0.0);
  out.back() = Complex(out.back().real(), 0.0);
}

EarSpectra apply_transfer(std::span<const Complex> spectrum, const TransferField& field,
                          std::size_t frame) {
  const std::size_t k_total = field.fft_size();
  if (spectrum.size() != k_total) {
    throw Error(Errc::kShapeMismatch, "spectrum has " + std::to_string(spectrum.size()) +
                                          " bins, field expects " + std::to_string(k_total));
  }
  const std::size_t bins = field.bins();
  EarSpectra result{std::vector<Complex>(k_total), std::vector<Complex>(k_total)};
  std::vector<Complex> half(bins);
  for (Ear ear : kEars) {
    auto& full = ear == Ear::kLeft ? result.first : result.second;
    apply_transfer_half(spectrum.first(bins), field, frame, ear, 0.0, half);
    std::copy(half.begin(), half.end(), full.begin());
    for (std::size_t k = 1; k < k_total - bins + 1; ++k) full[k_total - k] = std::conj(half[k]);
  }
  return result;
}

BinauralClip render_event(const MonoClip& clip, const TransferField& field, const FramePlan& plan,
                          const RenderOptions& options) {
  plan.validate();
  if (!field.derived()) throw Error(Errc::kPlanMismatch, "transfer field is not derived");
  const std::size_t n_in = clip.samples.size();
  const std::size_t frames = plan.frame_count(n_in);
  if (field.frames() != frames) {
    throw Error(Errc::kPlanMismatch, "field has " + std::to_string(field.frames()) +
                                         " frames, plan needs " + std::to_string(frames));
  }
  if (field.fft_size() != plan.fft_size) {
    throw Error(Errc::kPlanMismatch, "field FFT size " + std::to_string(field.fft_size()) +
                                         " differs from plan FFT size " + std::to_string(plan.fft_size));
  }
  const double max_shift = field.max_shift();
  if (static_cast<double>(plan.pad) < std::ceil(max_shift)) {
    throw Error(Errc::kPlanMismatch, "plan pad " + std::to_string(plan.pad) +
                                         " is below the largest shift " + std::to_string(max_shift));
  }

  const std::size_t k_size = plan.fft_size;
  const std::size_t n_out = n_in + plan.pad;
  const auto window = hann_window(plan.frame_length);
  // Periodic Hann at hop N/2 overlap-adds to this constant.
  const double cola = std::accumulate(window.begin(), window.end(), 0.0) / static_cast<double>(plan.hop);
  const double margin =
      std::min(kResidualMargin, std::floor(static_cast<double>(plan.fft_size - plan.frame_length) / 2.0));

  // Accumulators cover [-lead, n_out + K) so every frame lands inside them.
  const auto lead = static_cast<std::ptrdiff_t>(plan.frame_length + kResidualMargin + 1);
  const std::size_t acc_size = static_cast<std::size_t>(lead) + n_out + 2 * k_size;
  std::vector<double> acc_left(acc_size, 0.0), acc_right(acc_size, 0.0);

  RealFft fft(k_size);
  std::vector<double> frame_buf(k_size), ear_buf(k_size);
  std::vector<Complex> spectrum(fft.bins()), ear_spec(fft.bins());

  for (std::size_t f = 0; f < frames; ++f) {
    const std::ptrdiff_t start = plan.frame_start(f);
    std::fill(frame_buf.begin(), frame_buf.end(), 0.0);
    for (std::size_t j = 0; j < plan.frame_length; ++j) {
      const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(j);
      if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(n_in)) {
        frame_buf[j] = window[j] * clip.samples[static_cast<std::size_t>(idx)];
      }
    }
    fft.forward(frame_buf, spectrum);

    for (Ear ear : kEars) {
      // exp(-i w phi) = exp(-i w D) exp(-i w (phi - D)): D becomes a placement offset.
      const double offset = std::floor(field.min_shift(f, ear)) - margin;
      apply_transfer_half(spectrum, field, f, ear, offset, ear_spec);
      if (options.spectra_csv != nullptr) {
        auto& os = *options.spectra_csv;
        for (std::size_t k = 0; k < ear_spec.size(); ++k) {
          os << f << ',' << (ear == Ear::kLeft ? 'L' : 'R') << ',' << k << ',' << ear_spec[k].real()
             << ',' << ear_spec[k].imag() << '\n';
        }
      }
      fft.inverse(ear_spec, ear_buf);
      auto& acc = ear == Ear::kLeft ? acc_left : acc_right;
      const std::ptrdiff_t base = lead + start + static_cast<std::ptrdiff_t>(offset);
      for (std::size_t j = 0; j < k_size; ++j) {
        const std::ptrdiff_t pos = base + static_cast<std::ptrdiff_t>(j);
        if (pos >= 0 && pos < static_cast<std::ptrdiff_t>(acc_size)) {
          acc[static_cast<std::size_t>(pos)] += ear_buf[j];
        }
      }
    }
  }

  BinauralClip out;
  out.sample_rate = clip.sample_rate;
  out.left.resize(n_out);
  out.right.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    out.left[i] = acc_left[static_cast<std::size_t>(lead) + i] / cola;
    out.right[i] = acc_right[static_cast<std::size_t>(lead) + i] / cola;
  }
  return out;
}

MonoClip wola_roundtrip(const MonoClip& clip, const FramePlan& plan) {
  FramePlan p = plan;
  p.pad = 0;
  const auto field = constant_field(p.frame_count(clip.samples.size()), p.fft_size, 1.0, 0.0);
  auto rendered = render_event(clip, field, p);
  rendered.left.resize(clip.samples.size());
  return {std::move(rendered.left), clip.sample_rate};
}

}  // namespace earshot
