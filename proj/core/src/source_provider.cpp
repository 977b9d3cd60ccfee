#include "earshot/source_provider.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "earshot/error.hpp"
#include "earshot/http_client.hpp"
#include "earshot/resample.hpp"
#include "earshot/wav.hpp"
#include "json.hpp"

namespace earshot {
namespace {

constexpr double kPeak = 0.5;
constexpr double kFadeSeconds = 0.005;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t sample_count(double duration, int sample_rate) {
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

// Raw engine output only; the standard distributions are not portable.
std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  double peak = 0.0;
  for (auto& v : out) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = 2.0 * u - 1.0;
    peak = std::max(peak, std::abs(v));
  }
  if (peak > 0.0) {
    for (auto& v : out) v *= kPeak / peak;
  }
  return out;
}

MonoClip finalize(MonoClip clip) {
  for (auto& v : clip.samples) {
    if (!std::isfinite(v)) throw Error(Errc::kBadAudioPayload, "audio contains non-finite samples");
    v = std::clamp(v, -1.0, 1.0);
  }
  return clip;
}

MonoClip from_synth(const SceneEvent& event, const SynthBackend& backend, int sample_rate) {
  std::istringstream words(normalize_label(event.label));
  std::string head;
  std::getline(words, head, '_');
  std::string rest;
  std::getline(words, rest);
  auto number = [&](double fallback) {
    try {
      std::size_t used = 0;
      const double v = std::stod(rest, &used);
      return used > 0 && v > 0.0 && v < sample_rate / 2.0 ? v : fallback;
    } catch (const std::exception&) {
      return fallback;
    }
  };
  if (head == "tone" || head == "sine") {
    return synth_test_signal(SignalKind::kSine, event.duration, sample_rate, backend.seed, number(440.0));
  }
  if (head == "noise") return synth_test_signal(SignalKind::kNoise, event.duration, sample_rate, backend.seed);
  if (head == "chirp") return synth_test_signal(SignalKind::kChirp, event.duration, sample_rate, backend.seed);
  if (head == "click" || head == "impulse") {
    return synth_test_signal(SignalKind::kClick, event.duration, sample_rate, backend.seed);
  }
  return synth_test_signal(SignalKind::kNoise, event.duration, sample_rate,
                           backend.seed ^ fnv1a(event.label));
}

MonoClip from_corpus(const SceneEvent& event, const CorpusBackend& backend, int sample_rate) {
  std::error_code ec;
  if (!std::filesystem::is_directory(backend.directory, ec)) {
    throw Error(Errc::kIo, "corpus directory not found: " + backend.directory.string());
  }
  std::vector<std::filesystem::path> candidates;
  for (const auto& entry : std::filesystem::directory_iterator(backend.directory)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") candidates.push_back(entry.path());
  }
  std::sort(candidates.begin(), candidates.end());
  const std::string wanted = normalize_label(event.label);
  for (const auto& path : candidates) {
    if (normalize_label(path.stem().string()) != wanted) continue;
    MonoClip clip = to_mono(read_wav(path));
    clip.samples = resample(clip.samples, clip.sample_rate, sample_rate);
    clip.sample_rate = sample_rate;
    return finalize(std::move(clip));
  }
  throw Error(Errc::kLabelNotFound,
              "no '" + wanted + ".wav' for label '" + event.label + "' in " + backend.directory.string());
}

MonoClip from_service(const SceneEvent& event, const ServiceBackend& backend, int sample_rate) {
  const nlohmann::json request = {
      {"text", event.label}, {"duration_s", event.duration}, {"sample_rate", sample_rate}};
  std::vector<std::pair<std::string, std::string>> headers;
  if (!backend.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + backend.api_key);
  const auto reply = http_post(backend.url, request.dump(), "application/json",
                               backend.timeout_seconds, headers);
  MonoClip clip = to_mono(decode_wav(reply.body));
  if (clip.samples.empty()) throw Error(Errc::kBadAudioPayload, "service returned empty audio");
  clip.samples = resample(clip.samples, clip.sample_rate, sample_rate);
  clip.sample_rate = sample_rate;
  return finalize(std::move(clip));
}

}  // namespace

MonoClip synth_test_signal(SignalKind kind, double duration, int sample_rate, std::uint64_t seed,
                           double frequency) {
  if (!(duration > 0.0) || sample_rate <= 0) {
    throw Error(Errc::kRangeViolation, "test signal needs duration > 0 and sample rate > 0");
  }
  const std::size_t n = sample_count(duration, sample_rate);
  MonoClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.assign(n, 0.0);
  const double fs = sample_rate;
  switch (kind) {
    case SignalKind::kSine:
      for (std::size_t i = 0; i < n; ++i) {
        clip.samples[i] = kPeak * std::sin(2.0 * kPi * frequency * static_cast<double>(i) / fs);
      }
      break;
    case SignalKind::kNoise:
      clip.samples = white_noise(n, seed);
      break;
    case SignalKind::kChirp: {
      // Linear sweep from 100 Hz to 0.45 fs.
      const double f0 = 100.0;
      const double f1 = 0.45 * fs;
      const double total = static_cast<double>(n) / fs;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        clip.samples[i] = kPeak * std::sin(2.0 * kPi * (f0 * t + 0.5 * (f1 - f0) * t * t / total));
      }
      break;
    }
    case SignalKind::kClick:
      if (n > 0) clip.samples[0] = 1.0;
      break;
  }
  return clip;
}

MonoClip fit_duration(MonoClip clip, double duration) {
  if (!(duration > 0.0)) throw Error(Errc::kRangeViolation, "fit_duration needs duration > 0");
  const std::size_t n = sample_count(duration, clip.sample_rate);
  if (n == clip.samples.size()) return clip;
  if (n > clip.samples.size()) {
    clip.samples.resize(n, 0.0);
    return clip;
  }
  clip.samples.resize(n);
  const auto fade = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::llround(kFadeSeconds * clip.sample_rate)));
  for (std::size_t j = 0; j < fade; ++j) {
    clip.samples[n - fade + j] *= 1.0 - static_cast<double>(j + 1) / static_cast<double>(fade);
  }
  return clip;
}

SourceBackend parse_source_backend(std::string_view spec, std::uint64_t seed) {
  if (spec == "synth") return SynthBackend{seed};
  if (spec.starts_with("corpus:")) return CorpusBackend{std::string(spec.substr(7))};
  if (spec.starts_with("service:")) return ServiceBackend{std::string(spec.substr(8)), 120.0, {}};
  throw Error(Errc::kInvalidConfig,
              "unknown source backend '" + std::string(spec) + "' (corpus:<dir>|synth|service:<url>)");
}

std::string describe(const SourceBackend& backend) {
  return std::visit(
      [](const auto& b) -> std::string {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CorpusBackend>) return "corpus:" + b.directory.string();
        else if constexpr (std::is_same_v<T, SynthBackend>) return "synth";
        else return "service:" + b.url;
      },
      backend);
}

std::string normalize_label(std::string_view label) {
  const auto first = label.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  label = label.substr(first, label.find_last_not_of(" \t") - first + 1);
  std::string out;
  out.reserve(label.size());
  for (unsigned char c : label) out += c == ' ' ? '_' : static_cast<char>(std::tolower(c));
  return out;
}

MonoClip fetch_mono(const SceneEvent& event, const SourceBackend& backend, int sample_rate) {
  MonoClip clip = std::visit(
      [&](const auto& b) -> MonoClip {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CorpusBackend>) return from_corpus(event, b, sample_rate);
        else if constexpr (std::is_same_v<T, SynthBackend>) return from_synth(event, b, sample_rate);
        else return from_service(event, b, sample_rate);
      },
      backend);
  return fit_duration(std::move(clip), event.duration);
}

}  // namespace earshot
