#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace earshot {

inline constexpr int kDefaultSampleRate = 16000;

/// Single-channel audio. Samples are nominally in [-1, 1].
struct MonoClip {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const noexcept { return samples.size(); }
  double duration() const noexcept {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Two-channel (left, right) audio with equal channel lengths.
struct BinauralClip {
  std::vector<double> left;
  std::vector<double> right;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const noexcept { return left.size(); }
  double duration() const noexcept {
    return sample_rate > 0 ? static_cast<double>(left.size()) / sample_rate : 0.0;
  }
  std::span<const double> channel(int ear) const noexcept { return ear == 0 ? left : right; }
  std::span<double> channel(int ear) noexcept { return ear == 0 ? left : right; }
};

bool all_finite(std::span<const double> samples) noexcept;
double peak_abs(std::span<const double> samples) noexcept;

}  // namespace earshot
