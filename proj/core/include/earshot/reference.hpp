#pragma once

#include "earshot/audio.hpp"
#include "earshot/hrir.hpp"
#include "earshot/scene.hpp"
#include "earshot/transfer_field.hpp"

namespace earshot {

/// Time-domain benchmark path: convolves the clip with the HRIR pair interpolated at
/// the pose direction, then applies the propagation delay d * fs / c (windowed-sinc
/// fractional delay) and the distance gain used by the spatializer backends.
///
/// Output length is len(clip) + len(hrir) - 1 + ceil(delay).
/// Throws Error(kRateMismatch) when the clip and set rates differ.
BinauralClip reference_render(const MonoClip& clip, const SourcePose& pose, const HrirSet& set,
                              const SpatialConstants& constants = {});

}  // namespace earshot
