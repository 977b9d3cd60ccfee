#include "earshot/transfer_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "earshot/error.hpp"
#include "earshot/fft.hpp"

namespace earshot {

TransferField::TransferField(std::size_t frames, std::size_t fft_size, std::size_t channels)
    : frames_(frames), fft_size_(fft_size), channels_(channels) {
  if (frames == 0 || channels == 0 || !is_power_of_two(fft_size) || fft_size < 2) {
    throw Error(Errc::kShapeMismatch,
                "transfer field needs frames >= 1, channels >= 1 and a power-of-two FFT size");
  }
  const std::size_t n = frames * kEarCount * channels * bins();
  raw_scale_.assign(n, 0.0);
  raw_shift_.assign(n, 0.0);
  scale_.assign(n, 0.0);
  shift_.assign(n, 0.0);
  geometric_delay_.assign(frames * kEarCount, 0.0);
}

std::size_t TransferField::offset(std::size_t frame, Ear ear, std::size_t channel) const {
  return ((frame * kEarCount + static_cast<std::size_t>(ear)) * channels_ + channel) * bins();
}

std::span<double> TransferField::raw_scale(std::size_t f, Ear e, std::size_t c) {
  derived_ = false;
  return {raw_scale_.data() + offset(f, e, c), bins()};
}
std::span<const double> TransferField::raw_scale(std::size_t f, Ear e, std::size_t c) const {
  return {raw_scale_.data() + offset(f, e, c), bins()};
}
std::span<double> TransferField::raw_shift(std::size_t f, Ear e, std::size_t c) {
  derived_ = false;
  return {raw_shift_.data() + offset(f, e, c), bins()};
}
std::span<const double> TransferField::raw_shift(std::size_t f, Ear e, std::size_t c) const {
  return {raw_shift_.data() + offset(f, e, c), bins()};
}
double& TransferField::geometric_delay(std::size_t f, Ear e) {
  derived_ = false;
  return geometric_delay_[f * kEarCount + static_cast<std::size_t>(e)];
}
double TransferField::geometric_delay(std::size_t f, Ear e) const {
  return geometric_delay_[f * kEarCount + static_cast<std::size_t>(e)];
}
std::span<const double> TransferField::scale(std::size_t f, Ear e, std::size_t c) const {
  return {scale_.data() + offset(f, e, c), bins()};
}
std::span<const double> TransferField::shift(std::size_t f, Ear e, std::size_t c) const {
  return {shift_.data() + offset(f, e, c), bins()};
}

void TransferField::derive() {
  for (std::size_t f = 0; f < frames_; ++f) {
    for (Ear e : kEars) {
      const double g = geometric_delay(f, e);
      for (std::size_t c = 0; c < channels_; ++c) {
        const std::size_t base = offset(f, e, c);
        for (std::size_t k = 0; k < bins(); ++k) {
          const double phi = raw_shift_[base + k] + g;
          shift_[base + k] = phi;
          scale_[base + k] = phi > 0.0 ? raw_scale_[base + k] / (phi * phi) : raw_scale_[base + k];
        }
      }
    }
  }
  derived_ = true;
}

double TransferField::max_shift() const noexcept {
  double m = 0.0;
  for (double v : shift_) m = std::max(m, v);
  return m;
}

double TransferField::min_shift(std::size_t frame, Ear ear) const noexcept {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < channels_; ++c) {
    for (double v : shift(frame, ear, c)) m = std::min(m, v);
  }
  return m;
}

void TransferField::check_invariants(double rel_tol) const {
  auto fail = [](const std::string& what) { throw Error(Errc::kShapeMismatch, "transfer field: " + what); };
  if (!derived_) fail("derive() has not been called");
  const double cap = static_cast<double>(fft_size_) / 2.0;
  auto close = [rel_tol](double a, double b) {
    return std::abs(a - b) <= rel_tol * std::max({std::abs(a), std::abs(b), 1e-300});
  };
  for (std::size_t f = 0; f < frames_; ++f) {
    for (Ear e : kEars) {
      const double g = geometric_delay(f, e);
      if (!std::isfinite(g) || g < 0.0) fail("geometric delay must be finite and >= 0");
      for (std::size_t c = 0; c < channels_; ++c) {
        const std::size_t base = offset(f, e, c);
        for (std::size_t k = 0; k < bins(); ++k) {
          const double vs = raw_scale_[base + k];
          const double vp = raw_shift_[base + k];
          if (!std::isfinite(vs) || vs < 0.0) fail("raw scale must be finite and >= 0");
          if (!(vp >= 0.0 && vp < cap)) fail("raw shift outside [0, K/2)");
          const double phi = shift_[base + k];
          if (!close(phi, vp + g)) fail("shift != raw_shift + g");
          if (phi > 0.0 && !close(scale_[base + k] * phi * phi, vs)) fail("scale != raw_scale / shift^2");
        }
      }
    }
  }
}

double shift_cap(std::size_t fft_size) noexcept {
  return std::nextafter(static_cast<double>(fft_size) / 2.0, 0.0);
}

TransferField constant_field(std::size_t frames, std::size_t fft_size, double scale, double shift) {
  TransferField field(frames, fft_size, 1);
  for (std::size_t f = 0; f < frames; ++f) {
    for (Ear e : kEars) {
      auto vs = field.raw_scale(f, e);
      std::fill(vs.begin(), vs.end(), shift > 0.0 ? scale * shift * shift : scale);
      field.geometric_delay(f, e) = shift;
    }
  }
  field.derive();
  return field;
}

}  // namespace earshot
