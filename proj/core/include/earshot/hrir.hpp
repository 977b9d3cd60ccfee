#pragma once

#include <cstddef>
#include <algorithm>
#include <filesystem>
#include <vector>

namespace earshot {

struct HrirPair {
  std::vector<double> left;
  std::vector<double> right;

  std::size_t length() const noexcept { return std::max(left.size(), right.size()); }
};

struct HrirPoint {
  double azimuth = 0.0;    // degrees, [-180, 180)
  double elevation = 0.0;  // degrees, [-90, 90]
  HrirPair response;
};

struct InterpolationWeight {
  std::size_t index = 0;  // into HrirSet::points()
  double weight = 0.0;
};

/// Gridded head-related impulse responses, immutable after construction.
///
/// Points are grouped into elevation rings. Every ring except a pole (|el| = 90)
/// must cover the full azimuth circle with gaps of at most 15 degrees.
class HrirSet {
 public:
  /// Throws Error(kGridTooSparse) for coverage gaps and Error(kBadAudioPayload)
  /// for empty or non-finite responses.
  HrirSet(int sample_rate, std::vector<HrirPoint> points);

  /// Reads `index.json` (or `az<A>_el<E>.wav` names when no index exists).
  static HrirSet load(const std::filesystem::path& directory);
  /// Writes stereo float32 WAVs named `az<A>_el<E>.wav` plus `index.json`.
  void save(const std::filesystem::path& directory) const;

  int sample_rate() const noexcept { return sample_rate_; }
  const std::vector<HrirPoint>& points() const noexcept { return points_; }
  std::size_t max_response_length() const noexcept;

  /// Bilinear weights over the four nearest grid points (two azimuths on each of the
  /// two bracketing elevation rings), sorted by descending weight. Always 4 entries;
  /// queries outside the elevation range use the nearest ring only.
  std::vector<InterpolationWeight> interpolation_weights(double azimuth, double elevation) const;

  HrirPair interpolate(double azimuth, double elevation) const;

 private:
  struct Ring {
    double elevation;
    std::vector<std::size_t> members;  // sorted by azimuth
  };

  std::pair<InterpolationWeight, InterpolationWeight> ring_weights(const Ring& ring,
                                                                   double azimuth) const;

  int sample_rate_;
  std::vector<HrirPoint> points_;
  std::vector<Ring> rings_;
};

/// Parameters of the built-in KEMAR-style synthetic set.
struct SyntheticHrirOptions {
  int sample_rate = 16000;
  double azimuth_step = 15.0;
  std::vector<double> elevations = {-45, -30, -15, 0, 15, 30, 45, 60, 75, 90};
  std::size_t length = 256;
  double head_radius = 0.0875;
  double speed_of_sound = 343.0;
};

/// Spherical-head response for one direction: per-ear Woodworth onset delay, a
/// first-order head-shadow shelf, an elevation-dependent pinna reflection and a
/// high-frequency cut for rear directions.
HrirPair synthetic_hrir(double azimuth, double elevation, const SyntheticHrirOptions& options);

HrirSet make_synthetic_hrir_set(const SyntheticHrirOptions& options = {});

}  // namespace earshot
