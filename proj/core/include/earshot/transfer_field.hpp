#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace earshot {

enum class Ear : int { kLeft = 0, kRight = 1 };
inline constexpr int kEarCount = 2;
inline constexpr Ear kEars[kEarCount] = {Ear::kLeft, Ear::kRight};

/// Physical constants shared by the spatializer backends.
struct SpatialConstants {
  double head_radius = 0.0875;      // meters
  double speed_of_sound = 343.0;    // m/s
  double distance_floor = 0.1;      // meters; bounds the distance gain
  double reference_distance = 1.0;  // meters at which the distance gain is 1
};

/// Frame-wise binaural transfer model.
///
/// Per frame f, ear e, channel c and bin k the field holds the backend outputs
/// raw scale (varsigma >= 0) and raw shift (varphi, samples, 0 <= varphi < K/2),
/// plus a per-frame per-ear geometric delay g in samples. `derive()` computes
///
///   shift = varphi + g
///   scale = varsigma / shift^2      (scale = varsigma where shift == 0)
///
/// Only bins 0..K/2 are stored; the remaining bins follow from conjugate symmetry.
class TransferField {
 public:
  TransferField(std::size_t frames, std::size_t fft_size, std::size_t channels = 1);

  std::size_t frames() const noexcept { return frames_; }
  std::size_t fft_size() const noexcept { return fft_size_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t bins() const noexcept { return fft_size_ / 2 + 1; }

  std::span<double> raw_scale(std::size_t frame, Ear ear, std::size_t channel = 0);
  std::span<const double> raw_scale(std::size_t frame, Ear ear, std::size_t channel = 0) const;
  std::span<double> raw_shift(std::size_t frame, Ear ear, std::size_t channel = 0);
  std::span<const double> raw_shift(std::size_t frame, Ear ear, std::size_t channel = 0) const;
  double& geometric_delay(std::size_t frame, Ear ear);
  double geometric_delay(std::size_t frame, Ear ear) const;

  /// Recomputes the derived scale/shift arrays from the components.
  void derive();
  bool derived() const noexcept { return derived_; }

  std::span<const double> scale(std::size_t frame, Ear ear, std::size_t channel = 0) const;
  std::span<const double> shift(std::size_t frame, Ear ear, std::size_t channel = 0) const;

  double max_shift() const noexcept;
  /// Smallest derived shift over channels and bins for one frame/ear.
  double min_shift(std::size_t frame, Ear ear) const noexcept;

  /// Throws Error(kShapeMismatch) if any invariant fails: field derived, varsigma >= 0 and
  /// finite, 0 <= varphi < K/2, shift == varphi + g and scale == varsigma / shift^2
  /// within `rel_tol` relative.
  void check_invariants(double rel_tol = 1e-12) const;

 private:
  std::size_t offset(std::size_t frame, Ear ear, std::size_t channel) const;

  std::size_t frames_;
  std::size_t fft_size_;
  std::size_t channels_;
  std::vector<double> raw_scale_;
  std::vector<double> raw_shift_;
  std::vector<double> geometric_delay_;
  std::vector<double> scale_;
  std::vector<double> shift_;
  bool derived_ = false;
};

/// Largest varphi allowed for an FFT size: strictly below K/2.
double shift_cap(std::size_t fft_size) noexcept;

/// A field with the same scale and total shift everywhere (C = 1): varphi = 0,
/// g = shift and varsigma = scale * shift^2. Used for identity and pure-delay transfers.
TransferField constant_field(std::size_t frames, std::size_t fft_size, double scale, double shift);

}  // namespace earshot
