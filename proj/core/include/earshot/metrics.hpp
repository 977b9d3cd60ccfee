#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "earshot/audio.hpp"

namespace earshot {

struct StftResolution {
  std::size_t fft_size = 1024;
  std::size_t hop = 256;
};

struct MetricConfig {
  double lambda_l2 = 1e3;
  double lambda_phase = 1.0;
  double lambda_iid = 10.0;
  double lambda_stft = 1.0;
  std::vector<StftResolution> resolutions = {{512, 128}, {1024, 256}, {2048, 512}};
  StftResolution analysis = {1024, 256};  // STFT used by the phase and magnitude terms
  std::size_t iid_frame = 1024;
  double phase_gate_db = -60.0;

  /// Throws Error(kInvalidConfig) for negative weights, fewer than two resolutions,
  /// zero hops or sizes, or non-power-of-two FFT sizes.
  void validate() const;
};

struct MetricReport {
  double l2 = 0.0;
  double phase = 0.0;
  double iid = 0.0;
  double stft = 0.0;
  double magnitude = 0.0;
  double total = 0.0;

  std::string to_json(int indent = 2) const;
  static std::string csv_header();
  std::string csv_row() const;
};

/// Complex STFT of one channel with a periodic Hann window; frames start at 0 and the
/// tail is zero-padded so every sample is covered. Result is frames x (fft/2 + 1).
std::vector<std::vector<std::complex<double>>> stft(std::span<const double> x, StftResolution res);

/// l2: mean over channels of the RMS difference.
/// phase: mean |wrapped phase difference| over reference STFT bins above the gate
///   (magnitude normalized so a full-scale sine reads 0 dBFS).
/// iid: RMS over non-overlapping frames of the difference in 10 log10(E_L / E_R).
/// stft: sum over resolutions of spectral convergence plus mean |log|Y| - log|X||.
/// magnitude: mean | |X| - |Y| | over the analysis STFT.
/// Throws Error(kLengthMismatch) or Error(kRateMismatch).
MetricReport eval_pair(const BinauralClip& pred, const BinauralClip& ref, const MetricConfig& cfg = {});

}  // namespace earshot
