#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "earshot/hrir.hpp"
#include "earshot/scene.hpp"
#include "earshot/transfer_field.hpp"

namespace earshot {

/// Direct-path propagation delay, in (fractional) samples, from the source to one ear.
/// Ears sit at (0, -a, 0) (left) and (0, +a, 0) (right).
/// Throws Error(kDegenerateDistance) if the source is within 1 cm of the ear.
double geometric_delay(const SourcePose& pose, Ear ear, int sample_rate,
                       const SpatialConstants& constants = {});

/// Woodworth spherical-head ITD a (theta + sin theta) / c, theta the lateral angle.
double woodworth_itd(double lateral_angle, double head_radius, double speed_of_sound) noexcept;

/// |H(f)| of the head-shadow shelf (1 + i alpha f / f0) / (1 + i f / f0), f0 = c / (2 pi a).
double head_shadow_gain(double frequency, double alpha, double head_radius,
                        double speed_of_sound) noexcept;

/// Deterministic spherical-head stand-in for the learned scaler/shifter (C = 1 per ear).
///
/// The near ear has varphi = 0 and no shadow. The far ear gets the part of the
/// Woodworth ITD not already explained by the straight-line path difference in g,
/// and the head-shadow magnitude with alpha = 1 - |sin(lateral angle)|. varsigma is
/// chosen so that scale = shadow * g_ref / max(g, g_floor): unit gain at the
/// reference distance, amplitude ~ 1/d, energy ~ 1/d^2.
TransferField parametric_field(const SourcePose& pose, std::size_t frames, std::size_t fft_size,
                               int sample_rate, const SpatialConstants& constants = {});

/// Magnitude and delay summary of one impulse response on a K-point grid.
struct ResponseTransfer {
  std::vector<double> magnitude;  // |H(k)|, k = 0..K/2
  double delay = 0.0;             // energy-weighted mean group delay, samples
};

/// |FFT_K(h)| and sum_k |H|^2 tau_g(k) / sum_k |H|^2, which equals the energy centroid
/// sum n h[n]^2 / sum h[n]^2. Throws Error(kResponseTooLong) if 2 * len(h) > K.
ResponseTransfer response_transfer(std::span<const double> response, std::size_t fft_size);

/// HRIR-table backend: bilinear HRIR interpolation at the pose direction, varsigma from
/// the response magnitude, varphi from its group delay, g from the centre-of-head distance.
TransferField hrir_field(const SourcePose& pose, std::size_t frames, std::size_t fft_size,
                         const HrirSet& set, const SpatialConstants& constants = {});

}  // namespace earshot
