#include "earshot/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "earshot/error.hpp"

namespace earshot {
namespace {

static_assert(std::endian::native == std::endian::little, "WAV codec assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

[[noreturn]] void bad(const std::string& what) {
  throw Error(Errc::kBadAudioPayload, "invalid WAV data: " + what);
}

template <typename T>
T read_le(std::string_view bytes, std::size_t offset) {
  if (offset + sizeof(T) > bytes.size()) bad("truncated");
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

template <typename T>
void append_le(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

WavData decode_wav(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE") {
    bad("missing RIFF/WAVE header");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::string_view data;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const auto id = bytes.substr(pos, 4);
    const auto size = read_le<std::uint32_t>(bytes, pos + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
    if (id == "fmt ") {
      if (size < 16) bad("short fmt chunk");
      format = read_le<std::uint16_t>(bytes, body);
      channels = read_le<std::uint16_t>(bytes, body + 2);
      rate = read_le<std::uint32_t>(bytes, body + 4);
      bits = read_le<std::uint16_t>(bytes, body + 14);
      if (format == kFormatExtensible && size >= 26) format = read_le<std::uint16_t>(bytes, body + 24);
      have_fmt = true;
    } else if (id == "data") {
      data = bytes.substr(body, avail);
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) bad("missing fmt chunk");
  if (data.data() == nullptr) bad("missing data chunk");
  if (channels == 0 || rate == 0) bad("zero channels or sample rate");

  const std::size_t width = bits / 8;
  const bool pcm_ok = format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32);
  const bool float_ok = format == kFormatFloat && (bits == 32 || bits == 64);
  if (!pcm_ok && !float_ok) {
    bad("unsupported encoding (format " + std::to_string(format) + ", " + std::to_string(bits) + " bits)");
  }
  const std::size_t frames = data.size() / (width * channels);
  WavData wav;
  wav.sample_rate = static_cast<int>(rate);
  wav.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t off = (i * channels + c) * width;
      double v = 0.0;
      if (format == kFormatFloat) {
        v = bits == 32 ? static_cast<double>(read_le<float>(data, off)) : read_le<double>(data, off);
      } else if (bits == 16) {
        v = read_le<std::int16_t>(data, off) / 32768.0;
      } else if (bits == 24) {
        const auto b0 = static_cast<std::uint8_t>(data[off]);
        const auto b1 = static_cast<std::uint8_t>(data[off + 1]);
        const auto b2 = static_cast<std::uint8_t>(data[off + 2]);
        std::int32_t s = b0 | (b1 << 8) | (b2 << 16);
        if (s & 0x800000) s -= 0x1000000;
        v = s / 8388608.0;
      } else {
        v = read_le<std::int32_t>(data, off) / 2147483648.0;
      }
      wav.channels[c][i] = v;
    }
  }
  return wav;
}

std::string encode_wav(const WavData& wav, WavEncoding encoding) {
  const auto channels = static_cast<std::uint16_t>(wav.channels.size());
  if (channels == 0) throw Error(Errc::kBadAudioPayload, "cannot encode WAV without channels");
  const std::size_t frames = wav.channels.front().size();
  for (const auto& ch : wav.channels) {
    if (ch.size() != frames) throw Error(Errc::kShapeMismatch, "WAV channels differ in length");
  }
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint16_t format = encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat;
  const std::uint16_t block_align = channels * (bits / 8);
  const auto data_size = static_cast<std::uint32_t>(frames * block_align);

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  append_le<std::uint32_t>(out, 36 + data_size);
  out += "WAVEfmt ";
  append_le<std::uint32_t>(out, 16);
  append_le<std::uint16_t>(out, format);
  append_le<std::uint16_t>(out, channels);
  append_le<std::uint32_t>(out, static_cast<std::uint32_t>(wav.sample_rate));
  append_le<std::uint32_t>(out, static_cast<std::uint32_t>(wav.sample_rate) * block_align);
  append_le<std::uint16_t>(out, block_align);
  append_le<std::uint16_t>(out, bits);
  out += "data";
  append_le<std::uint32_t>(out, data_size);
  for (std::size_t i = 0; i < frames; ++i) {
    for (const auto& ch : wav.channels) {
      const double v = ch[i];
      if (encoding == WavEncoding::kPcm16) {
        const double scaled = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
        append_le<std::int16_t>(out, static_cast<std::int16_t>(scaled));
      } else {
        append_le<float>(out, static_cast<float>(v));
      }
    }
  }
  return out;
}

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return decode_wav(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_wav(const std::filesystem::path& path, const WavData& wav, WavEncoding encoding) {
  const std::string bytes = encode_wav(wav, encoding);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::kIo, "short write to " + path.string());
}

MonoClip to_mono(const WavData& wav) {
  MonoClip clip;
  clip.sample_rate = wav.sample_rate;
  if (wav.channels.empty()) return clip;
  clip.samples.assign(wav.channels.front().size(), 0.0);
  const double scale = 1.0 / static_cast<double>(wav.channels.size());
  for (const auto& ch : wav.channels) {
    for (std::size_t i = 0; i < ch.size(); ++i) clip.samples[i] += ch[i] * scale;
  }
  return clip;
}

WavData from_mono(const MonoClip& clip) { return {clip.sample_rate, {clip.samples}}; }

WavData from_binaural(const BinauralClip& clip) {
  return {clip.sample_rate, {clip.left, clip.right}};
}

BinauralClip to_binaural(const WavData& wav) {
  if (wav.channels.size() != 2) {
    throw Error(Errc::kShapeMismatch,
                "expected a stereo WAV, got " + std::to_string(wav.channels.size()) + " channel(s)");
  }
  return {wav.channels[0], wav.channels[1], wav.sample_rate};
}

}  // namespace earshot
