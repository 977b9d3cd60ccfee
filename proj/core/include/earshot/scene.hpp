#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "earshot/audio.hpp"

namespace earshot {

/// One sound source of a scene, as written in a `label@dur@az, el@dist@start` record.
///
/// Angles are in degrees, listener-centric: azimuth 0 is straight ahead and
/// positive azimuth is to the right; positive elevation is up. Azimuth is kept
/// normalized to [-180, 180).
struct SceneEvent {
  std::string label;
  double duration = 0.0;    // seconds, > 0
  double azimuth = 0.0;     // degrees, [-180, 180)
  double elevation = 0.0;   // degrees, [-90, 90]
  double distance = 1.0;    // meters, > 0
  double start_time = 0.0;  // seconds, >= 0

  bool operator==(const SceneEvent&) const = default;
};

struct Scene {
  std::vector<SceneEvent> events;
  int sample_rate = kDefaultSampleRate;

  /// max(start_time + duration) over events.
  double timeline_length() const noexcept;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const noexcept;
  Vec3 operator-(const Vec3& o) const noexcept { return {x - o.x, y - o.y, z - o.z}; }
};

struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const noexcept;
};

/// Source placement relative to a listener at the origin facing +x (+y right, +z up).
struct SourcePose {
  Vec3 position;
  Quaternion orientation;

  double distance() const noexcept { return position.norm(); }
  /// Azimuth/elevation in degrees recovered from the position.
  double azimuth_deg() const noexcept;
  double elevation_deg() const noexcept;
};

/// Maps any finite angle into [-180, 180).
double normalize_azimuth(double degrees) noexcept;

/// Normalizes azimuth and checks every SceneEvent invariant; throws ParseError(kRangeViolation).
SceneEvent validate_event(SceneEvent event, int line = 0);

/// Parses one `@` record. `line` is only used for error reporting.
SceneEvent parse_scene_line(std::string_view line, int line_number = 0);

/// Parses a scene file: one record per line, blank and `#` lines skipped,
/// optional `sr=<Hz>` header before the first record.
Scene parse_scene(std::string_view text);

/// Shortest decimal text that reparses to exactly `value` (no exponent).
std::string format_decimal(double value);

std::string serialize_event(const SceneEvent& event);
std::string serialize_scene(const Scene& scene);

/// JSON array form: [{label, duration, azimuth, elevation, distance, start_time}, ...].
std::string scene_to_json(const Scene& scene, int indent = 2);
Scene scene_from_json(std::string_view json_text, int sample_rate = kDefaultSampleRate);

/// Spherical to Cartesian: x = d cos(el) cos(az), y = d cos(el) sin(az), z = d sin(el).
/// Orientation is the identity (static sources).
SourcePose event_pose(const SceneEvent& event);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }

}  // namespace earshot
