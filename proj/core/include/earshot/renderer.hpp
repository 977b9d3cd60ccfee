#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "earshot/audio.hpp"
#include "earshot/fft.hpp"
#include "earshot/transfer_field.hpp"

namespace earshot {

/// Analysis/synthesis framing. Hann analysis window with hop = frame_length / 2
/// (constant overlap-add), frames zero-padded to fft_size.
struct FramePlan {
  std::size_t fft_size = 2048;
  std::size_t frame_length = 1024;
  std::size_t hop = 512;
  std::size_t pad = 0;  // output samples reserved after the input for delayed energy

  /// Throws Error(kPlanMismatch) unless K is a power of two >= frame_length and
  /// hop == frame_length / 2.
  void validate() const;
  /// Frames needed to cover `samples` input samples with full overlap-add coverage.
  std::size_t frame_count(std::size_t samples) const;
  /// Input index of frame f's first sample (the first frame starts at -hop).
  std::ptrdiff_t frame_start(std::size_t frame) const;
  /// Copy with pad = ceil(max shift of `field`).
  FramePlan with_pad_for(const TransferField& field) const;
};

/// Output spectra for the left and right ear.
using EarSpectra = std::pair<std::vector<Complex>, std::vector<Complex>>;

/// Applies one frame of the transfer model to a full K-point spectrum of a real frame:
///
///   Y_ear(k) = sum_c scale_ear(c, k) exp(-i w_k shift_ear(c, k)) X(k),  w_k = 2 pi k / K
///
/// for k = 0..K/2; bins above K/2 are set to the conjugate mirror so the inverse is real.
/// Throws Error(kShapeMismatch) if sizes disagree with the field.
EarSpectra apply_transfer(std::span<const Complex> spectrum, const TransferField& field,
                          std::size_t frame);

/// Same operation on the half spectrum (bins 0..K/2) with an integer offset removed
/// from the shift: the phase ramp uses shift - offset. Writes into `out`.
void apply_transfer_half(std::span<const Complex> half_spectrum, const TransferField& field,
                         std::size_t frame, Ear ear, double offset, std::span<Complex> out);

struct RenderOptions {
  /// When set, receives `frame,ear,bin,re,im` rows of every output spectrum.
  std::ostream* spectra_csv = nullptr;
};

/// Frame-wise Fourier-domain rendering with weighted overlap-add synthesis.
///
/// Each frame's total shift is split per ear into an integer offset, realized as the
/// overlap-add placement, and a residual applied as a phase ramp. No noise is added.
/// Output length is input length + plan.pad.
/// Throws Error(kPlanMismatch) when the field's frame count or FFT size does not match
/// the plan, or plan.pad < ceil(field.max_shift()).
BinauralClip render_event(const MonoClip& clip, const TransferField& field, const FramePlan& plan,
                          const RenderOptions& options = {});

/// Analysis then synthesis through an identity transfer; returns the left ear
/// trimmed to the input length.
MonoClip wola_roundtrip(const MonoClip& clip, const FramePlan& plan);

}  // namespace earshot
