#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "earshot/audio.hpp"
#include "earshot/scene.hpp"

namespace earshot {

enum class SignalKind { kSine, kNoise, kChirp, kClick };

/// Deterministic desk-scale test sources. Sine, noise and chirp peak at 0.5;
/// the click is a unit impulse at t = 0.
MonoClip synth_test_signal(SignalKind kind, double duration, int sample_rate,
                           std::uint64_t seed = 0, double frequency = 440.0);

/// Truncates or zero-pads the tail to round(duration * sample_rate) samples.
/// A 5 ms linear fade-out is applied at a truncation cut. Same length is a passthrough.
MonoClip fit_duration(MonoClip clip, double duration);

/// Directory of `<normalized label>.wav` files.
struct CorpusBackend {
  std::filesystem::path directory;
};

/// Labels like "tone 440", "sine 1000", "noise", "chirp", "click" map to the
/// matching test signal; anything else becomes white noise seeded by the label.
struct SynthBackend {
  std::uint64_t seed = 0;
};

/// Generic text-to-audio endpoint: POST {text, duration_s, sample_rate} -> WAV bytes.
struct ServiceBackend {
  std::string url;
  double timeout_seconds = 120.0;
  std::string api_key;
};

using SourceBackend = std::variant<CorpusBackend, SynthBackend, ServiceBackend>;

/// "corpus:<dir>", "synth" or "service:<url>".
SourceBackend parse_source_backend(std::string_view spec, std::uint64_t seed = 0);
std::string describe(const SourceBackend& backend);

/// Lowercase, spaces to underscores.
std::string normalize_label(std::string_view label);

/// Mono clip for one event at `sample_rate`, exactly the event's duration long.
MonoClip fetch_mono(const SceneEvent& event, const SourceBackend& backend, int sample_rate);

}  // namespace earshot
