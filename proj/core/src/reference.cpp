#include "earshot/reference.hpp"

#include <algorithm>
#include <cmath>

#include "earshot/dsp.hpp"
#include "earshot/error.hpp"

namespace earshot {

BinauralClip reference_render(const MonoClip& clip, const SourcePose& pose, const HrirSet& set,
                              const SpatialConstants& constants) {
  if (clip.sample_rate != set.sample_rate()) {
    throw Error(Errc::kRateMismatch, "clip rate " + std::to_string(clip.sample_rate) +
                                         " differs from HRIR rate " + std::to_string(set.sample_rate()));
  }
  const double d = pose.distance();
  if (!(d >= 0.01)) throw Error(Errc::kDegenerateDistance, "source is closer than 0.01 m to the listener");
  const double samples_per_meter = clip.sample_rate / constants.speed_of_sound;
  const double delay = d * samples_per_meter;
  const double gain = constants.reference_distance / std::max(d, constants.distance_floor);

  const HrirPair pair = set.interpolate(pose.azimuth_deg(), pose.elevation_deg());
  const std::size_t out_len =
      clip.samples.size() + pair.length() - 1 + static_cast<std::size_t>(std::ceil(delay));

  BinauralClip out;
  out.sample_rate = clip.sample_rate;
  for (Ear ear : kEars) {
    const auto& h = ear == Ear::kLeft ? pair.left : pair.right;
    auto y = fractional_delay(convolve(clip.samples, h), delay, out_len);
    for (auto& v : y) v *= gain;
    (ear == Ear::kLeft ? out.left : out.right) = std::move(y);
  }
  return out;
}

}  // namespace earshot
