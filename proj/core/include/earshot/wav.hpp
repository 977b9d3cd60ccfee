#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "earshot/audio.hpp"

namespace earshot {

enum class WavEncoding { kPcm16, kFloat32 };

/// Decoded WAV contents: channels stored separately, samples as doubles.
struct WavData {
  int sample_rate = 0;
  std::vector<std::vector<double>> channels;
};

/// Decodes RIFF/WAVE bytes (PCM 16/24/32-bit or IEEE float32/64, any channel count).
/// Throws Error(kBadAudioPayload) on malformed input.
WavData decode_wav(std::string_view bytes);
std::string encode_wav(const WavData& wav, WavEncoding encoding);

WavData read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const WavData& wav, WavEncoding encoding);

/// Averages all channels into one.
MonoClip to_mono(const WavData& wav);
WavData from_mono(const MonoClip& clip);
WavData from_binaural(const BinauralClip& clip);
/// Requires exactly two channels.
BinauralClip to_binaural(const WavData& wav);

}  // namespace earshot
