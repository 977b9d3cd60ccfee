#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "earshot/audio.hpp"

namespace earshot {

struct Placement {
  BinauralClip clip;
  double start_time = 0.0;  // seconds
  std::string label;        // reporting only
};

class Timeline {
 public:
  explicit Timeline(int sample_rate = kDefaultSampleRate) : sample_rate_(sample_rate) {}

  void add(BinauralClip clip, double start_time, std::string label = {});

  int sample_rate() const noexcept { return sample_rate_; }
  const std::vector<Placement>& placements() const noexcept { return placements_; }
  /// Start time rounded to the nearest sample.
  std::size_t start_sample(const Placement& placement) const noexcept;
  /// max over placements of start sample + clip length.
  std::size_t total_length() const noexcept;

 private:
  int sample_rate_;
  std::vector<Placement> placements_;
};

struct MixResult {
  BinauralClip output;
  double gain = 1.0;           // global gain applied after summation
  double peak_before = 0.0;    // peak |sample| of the raw sum
  std::vector<double> event_peaks;  // per placement, insertion order
};

/// Sums placements in ascending start order (ties by insertion order) and applies one
/// global gain of 0.99 / peak if the sum exceeds 1.
/// Throws Error(kSampleRateMismatch) if any clip's rate differs from the timeline's.
MixResult mix(const Timeline& timeline);

/// JSON render report: timeline length, applied gain, per-event peak and placement.
std::string mix_report_json(const Timeline& timeline, const MixResult& result, int indent = 2);

}  // namespace earshot
