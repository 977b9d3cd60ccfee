#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "earshot/scene.hpp"

namespace earshot {

struct PositionDefault {
  double azimuth = 0.0;
  double elevation = 0.0;
  double distance = 1.5;
};

/// Label keyword -> position used when prose names no position.
using DefaultsTable = std::map<std::string, PositionDefault>;

/// dog, bird, thunder and footsteps.
DefaultsTable builtin_defaults();
/// `keyword = az, el, dist` per line; blank and `#` lines skipped.
/// Throws ParseError(kFieldCount | kNumberParse | kRangeViolation).
DefaultsTable parse_defaults_table(std::string_view text);
/// Throws Error(kIo) if the file cannot be read.
DefaultsTable load_defaults_table(const std::filesystem::path& path);

/// Instructions sent ahead of the prose in service mode.
std::string default_prompt_template();

struct SegmenterConfig {
  std::string endpoint = "offline";  // "offline" or an http:// URL
  std::string prompt_template = default_prompt_template();
  double timeout_seconds = 30.0;
  DefaultsTable defaults = builtin_defaults();
  std::string api_key;
  int sample_rate = kDefaultSampleRate;

  bool offline() const noexcept { return endpoint.empty() || endpoint == "offline"; }
};

/// Service mode posts {"prompt": template + prose} and parses the `text` of the reply as
/// `@`-records. Offline mode runs rule_fallback.
/// Throws Error(kServiceUnreachable), MalformedReplyError or Error(kNoEventsFound).
Scene segment_text(std::string_view prose, const SegmenterConfig& cfg);

/// Deterministic offline segmentation.
///
/// Clauses split on sentence punctuation, semicolons, newlines and "then". Within a
/// clause: "azimuth N", "elevation N", "N m", "for N s" (duration) and "at/starting/after
/// N s" (start) set explicit values; left/right/front/behind and above/below map to
/// angle presets. Without any position word the label is looked up in `defaults`.
/// Missing duration is 5 s, distance 1.5 m, and untimed events start when the
/// previous one ends. Throws Error(kNoEventsFound).
Scene rule_fallback(std::string_view prose, const DefaultsTable& defaults,
                    int sample_rate = kDefaultSampleRate);

}  // namespace earshot
