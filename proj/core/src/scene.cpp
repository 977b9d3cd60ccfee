#include "earshot/scene.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

#include "earshot/error.hpp"
#include "json.hpp"

namespace earshot {
namespace {

constexpr std::string_view kWhitespace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(kWhitespace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kWhitespace);
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// Accepts [+-]?(digits[.digits]|.digits); no exponent, no inf/nan.
bool is_plain_decimal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t int_digits = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++int_digits;
  std::size_t frac_digits = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++frac_digits;
  }
  return i == s.size() && (int_digits + frac_digits) > 0;
}

double parse_number(std::string_view raw, const char* field, int line) {
  const std::string_view s = trim(raw);
  if (!is_plain_decimal(s)) {
    throw ParseError(Errc::kNumberParse, field, line,
                     "expected a decimal number, got '" + std::string(s) + "'");
  }
  std::string_view digits = s;
  if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value,
                                         std::chars_format::fixed);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || !std::isfinite(value)) {
    throw ParseError(Errc::kNumberParse, field, line,
                     "number out of range: '" + std::string(s) + "'");
  }
  return value;
}

void require(bool ok, const char* field, int line, const std::string& detail) {
  if (!ok) throw ParseError(Errc::kRangeViolation, field, line, detail);
}

bool is_comment_or_blank(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

}  // namespace

double Scene::timeline_length() const noexcept {
  double end = 0.0;
  for (const auto& e : events) end = std::max(end, e.start_time + e.duration);
  return end;
}

double Vec3::norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }

double Quaternion::norm() const noexcept { return std::sqrt(w * w + x * x + y * y + z * z); }

double SourcePose::azimuth_deg() const noexcept {
  return normalize_azimuth(rad_to_deg(std::atan2(position.y, position.x)));
}

double SourcePose::elevation_deg() const noexcept {
  const double d = distance();
  if (d <= 0.0) return 0.0;
  return rad_to_deg(std::asin(std::clamp(position.z / d, -1.0, 1.0)));
}

double normalize_azimuth(double degrees) noexcept {
  double a = std::fmod(degrees + 180.0, 360.0);
  if (a < 0.0) a += 360.0;
  a -= 180.0;
  if (a >= 180.0) a -= 360.0;
  return a;
}

SceneEvent validate_event(SceneEvent event, int line) {
  event.label = std::string(trim(event.label));
  require(!event.label.empty(), "label", line, "label is empty");
  require(event.label.find_first_of("@\r\n") == std::string::npos, "label", line,
          "label must not contain '@' or line breaks");
  require(event.label.front() != '#', "label", line, "label must not start with '#'");
  require(std::isfinite(event.duration) && event.duration > 0.0, "duration", line,
          "duration must be > 0");
  require(std::isfinite(event.azimuth), "azimuth", line, "azimuth must be finite");
  event.azimuth = normalize_azimuth(event.azimuth);
  require(std::isfinite(event.elevation) && event.elevation >= -90.0 && event.elevation <= 90.0,
          "elevation", line, "elevation must lie in [-90, 90]");
  require(std::isfinite(event.distance) && event.distance > 0.0, "distance", line,
          "distance must be > 0");
  require(std::isfinite(event.start_time) && event.start_time >= 0.0, "start_time", line,
          "start time must be >= 0");
  return event;
}

SceneEvent parse_scene_line(std::string_view line, int line_number) {
  const auto fields = split(trim(line), '@');
  if (fields.size() != 5) {
    throw ParseError(Errc::kFieldCount, "record", line_number,
                     "expected 5 '@'-separated fields, got " + std::to_string(fields.size()));
  }
  const auto angles = split(fields[2], ',');
  if (angles.size() != 2) {
    throw ParseError(Errc::kFieldCount, "azimuth, elevation", line_number,
                     "expected 'azimuth, elevation', got " + std::to_string(angles.size()) +
                         " value(s)");
  }
  SceneEvent e;
  e.label = std::string(trim(fields[0]));
  e.duration = parse_number(fields[1], "duration", line_number);
  e.azimuth = parse_number(angles[0], "azimuth", line_number);
  e.elevation = parse_number(angles[1], "elevation", line_number);
  e.distance = parse_number(fields[3], "distance", line_number);
  e.start_time = parse_number(fields[4], "start_time", line_number);
  return validate_event(std::move(e), line_number);
}

Scene parse_scene(std::string_view text) {
  Scene scene;
  int line_number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(start, end - start);
    ++line_number;
    start = end + 1;
    if (is_comment_or_blank(line)) continue;

    const auto t = trim(line);
    if (scene.events.empty() && t.find('@') == std::string_view::npos && t.starts_with("sr=")) {
      const double sr = parse_number(t.substr(3), "sr", line_number);
      if (sr < 1.0 || sr != std::floor(sr) || sr > 1e6) {
        throw ParseError(Errc::kRangeViolation, "sr", line_number,
                         "sample rate must be a positive integer");
      }
      scene.sample_rate = static_cast<int>(sr);
      continue;
    }
    scene.events.push_back(parse_scene_line(line, line_number));
  }
  if (scene.events.empty()) {
    throw ParseError(Errc::kEmptyScene, "", 0, "scene contains no events");
  }
  return scene;
}

std::string format_decimal(double value) {
  std::array<char, 512> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf.data(), ptr);
}

std::string serialize_event(const SceneEvent& e) {
  std::string out = e.label;
  out += '@';
  out += format_decimal(e.duration);
  out += '@';
  out += format_decimal(e.azimuth);
  out += ", ";
  out += format_decimal(e.elevation);
  out += '@';
  out += format_decimal(e.distance);
  out += '@';
  out += format_decimal(e.start_time);
  return out;
}

std::string serialize_scene(const Scene& scene) {
  std::string out;
  if (scene.sample_rate != kDefaultSampleRate) {
    out += "sr=" + std::to_string(scene.sample_rate) + "\n";
  }
  for (const auto& e : scene.events) {
    out += serialize_event(e);
    out += '\n';
  }
  return out;
}

std::string scene_to_json(const Scene& scene, int indent) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : scene.events) {
    arr.push_back({{"label", e.label},
                   {"duration", e.duration},
                   {"azimuth", e.azimuth},
                   {"elevation", e.elevation},
                   {"distance", e.distance},
                   {"start_time", e.start_time}});
  }
  return arr.dump(indent);
}

Scene scene_from_json(std::string_view json_text, int sample_rate) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(Errc::kNumberParse, "json", 0, ex.what());
  }
  Scene scene;
  scene.sample_rate = sample_rate;
  const nlohmann::json* events = &doc;
  if (doc.is_object()) {
    if (doc.contains("sample_rate")) {
      const auto& sr = doc.at("sample_rate");
      if (!sr.is_number_integer() || sr.get<long long>() < 1 || sr.get<long long>() > 1000000) {
        throw ParseError(Errc::kRangeViolation, "sample_rate", 0, "sample rate must be a positive integer");
      }
      scene.sample_rate = sr.get<int>();
    }
    if (!doc.contains("events")) throw ParseError(Errc::kFieldCount, "events", 0, "missing");
    events = &doc.at("events");
  }
  if (!events->is_array()) {
    throw ParseError(Errc::kFieldCount, "json", 0, "expected an array of events");
  }
  int index = 0;
  for (const auto& item : *events) {
    ++index;
    if (!item.is_object()) throw ParseError(Errc::kFieldCount, "event", index, "not an object");
    auto number = [&](const char* key) {
      if (!item.contains(key)) throw ParseError(Errc::kFieldCount, key, index, "missing");
      const auto& v = item.at(key);
      if (!v.is_number()) throw ParseError(Errc::kNumberParse, key, index, "not a number");
      return v.get<double>();
    };
    if (!item.contains("label") || !item.at("label").is_string()) {
      throw ParseError(Errc::kFieldCount, "label", index, "missing or not a string");
    }
    SceneEvent e;
    e.label = item.at("label").get<std::string>();
    e.duration = number("duration");
    e.azimuth = number("azimuth");
    e.elevation = number("elevation");
    e.distance = number("distance");
    e.start_time = number("start_time");
    scene.events.push_back(validate_event(std::move(e), index));
  }
  if (scene.events.empty()) throw ParseError(Errc::kEmptyScene, "", 0, "scene contains no events");
  return scene;
}

SourcePose event_pose(const SceneEvent& e) {
  const double az = deg_to_rad(e.azimuth);
  const double el = deg_to_rad(e.elevation);
  SourcePose pose;
  pose.position = {e.distance * std::cos(el) * std::cos(az),
                   e.distance * std::cos(el) * std::sin(az),
                   e.distance * std::sin(el)};
  return pose;
}

}  // namespace earshot
