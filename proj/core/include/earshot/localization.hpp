#pragma once

#include <string>

#include "earshot/audio.hpp"
#include "earshot/hrir.hpp"

namespace earshot {

enum class Lateral { kLeft, kRight, kCenter };
enum class FrontRear { kFront, kRear, kUnknown };
enum class Vertical { kAbove, kBelow, kLevel, kUnknown };

std::string to_string(Lateral value);
std::string to_string(FrontRear value);
std::string to_string(Vertical value);

struct DirectionEstimate {
  Lateral lateral = Lateral::kCenter;
  FrontRear front_rear = FrontRear::kUnknown;
  Vertical vertical = Vertical::kUnknown;
  double confidence = 0.0;  // left/right confidence in [0, 1]
  double lag_samples = 0.0; // > 0: left ear lags, source on the right
  double ild_db = 0.0;      // 10 log10(E_R / E_L)
  double template_azimuth = 0.0;
  double template_elevation = 0.0;
  bool template_matched = false;

  std::string to_json(int indent = 2) const;
};

/// Interaural-cue direction oracle.
///
/// Left/right comes from the GCC-PHAT lag searched within 1 ms, with the ILD sign
/// deciding when the lag is under half a sample. Front/rear and above/below come
/// from the nearest template in `templates` by log-spectral distance; without
/// templates both are reported as unknown.
/// Throws Error(kTooShort) for clips under 0.25 s.
DirectionEstimate estimate_direction(const BinauralClip& clip, const HrirSet* templates = nullptr);

}  // namespace earshot
