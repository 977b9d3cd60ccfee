#include "earshot/hrir.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "earshot/dsp.hpp"
#include "earshot/error.hpp"
#include "earshot/scene.hpp"
#include "earshot/wav.hpp"
#include "json.hpp"

namespace earshot {
namespace {

constexpr double kMaxAzimuthGap = 15.0;
constexpr double kAngleEps = 1e-9;

bool is_pole(double elevation) { return std::abs(elevation) >= 90.0 - kAngleEps; }

std::string response_file_name(double azimuth, double elevation) {
  return "az" + format_decimal(azimuth) + "_el" + format_decimal(elevation) + ".wav";
}

// First-order shelf H(s) = (1 + g s / wc) / (1 + s / wc) via the bilinear transform:
// unity at DC, gain g at Nyquist.
std::vector<double> shelf(std::span<const double> x, double hf_gain, double corner_hz, int fs) {
  const double k = 2.0 * fs / (2.0 * kPi * corner_hz);
  const double b0 = (1.0 + hf_gain * k) / (1.0 + k);
  const double b1 = (1.0 - hf_gain * k) / (1.0 + k);
  const double a1 = (1.0 - k) / (1.0 + k);
  std::vector<double> y(x.size());
  double x1 = 0.0, y1 = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    y[n] = b0 * x[n] + b1 * x1 - a1 * y1;
    x1 = x[n];
    y1 = y[n];
  }
  return y;
}

std::vector<double> synthetic_ear(double azimuth, double elevation, double ear_sign,
                                  const SyntheticHrirOptions& o) {
  const double az = deg_to_rad(azimuth);
  const double el = deg_to_rad(elevation);
  const double fs = o.sample_rate;
  const double a_over_c = o.head_radius / o.speed_of_sound;

  // Angle between the ear axis (+y right ear, -y left ear) and the source direction.
  const double cos_ear = std::clamp(ear_sign * std::cos(el) * std::sin(az), -1.0, 1.0);
  const double theta = std::acos(cos_ear);

  // Per-ear spherical-head delay; the two ears differ by a (theta + sin theta) / c.
  const double tau = theta < kPi / 2 ? -a_over_c * cos_ear : a_over_c * (theta - kPi / 2);
  const double onset = 32.0 + (a_over_c + tau) * fs;
  const std::vector<double> impulse = {1.0};
  auto h = fractional_delay(impulse, onset, o.length);

  // Head shadow: HF gain from +6 dB facing the ear down to -20 dB near 150 degrees.
  constexpr double kAlphaMin = 0.1;
  constexpr double kThetaMin = 5.0 * kPi / 6.0;
  const double alpha = (1.0 + kAlphaMin / 2.0) + (1.0 - kAlphaMin / 2.0) * std::cos(theta / kThetaMin * kPi);
  h = shelf(h, alpha, o.speed_of_sound / (kPi * o.head_radius), o.sample_rate);

  // Pinna reflection: notch frequency rises with elevation, deeper for frontal sources.
  const double notch_hz = std::min(4000.0 + 3000.0 * (std::clamp(elevation, -45.0, 90.0) + 45.0) / 135.0,
                                   0.45 * fs);
  const double reflection_delay = fs / (2.0 * notch_hz);
  const double reflection_gain = 0.45 + 0.2 * std::cos(az) * std::cos(el);
  const auto echo = fractional_delay(h, reflection_delay, h.size());
  for (std::size_t n = 0; n < h.size(); ++n) h[n] += reflection_gain * echo[n];

  // Rear sources lose high frequencies behind the pinna.
  const double rearness = std::max(0.0, -std::cos(az)) * std::cos(el);
  h = shelf(h, 1.0 - 0.7 * rearness, 3000.0, o.sample_rate);

  const std::size_t taper = std::min<std::size_t>(32, h.size());
  for (std::size_t j = 0; j < taper; ++j) {
    h[h.size() - taper + j] *= 0.5 + 0.5 * std::cos(kPi * static_cast<double>(j + 1) / static_cast<double>(taper));
  }
  return h;
}

}  // namespace

HrirSet::HrirSet(int sample_rate, std::vector<HrirPoint> points)
    : sample_rate_(sample_rate), points_(std::move(points)) {
  if (sample_rate_ <= 0) throw Error(Errc::kRateMismatch, "HRIR set needs a positive sample rate");
  if (points_.empty()) throw Error(Errc::kGridTooSparse, "HRIR set is empty");

  std::map<long long, Ring> by_elevation;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    auto& p = points_[i];
    if (!std::isfinite(p.azimuth) || !std::isfinite(p.elevation) || p.elevation < -90.0 ||
        p.elevation > 90.0) {
      throw Error(Errc::kGridTooSparse, "HRIR grid point has an invalid direction");
    }
    p.azimuth = normalize_azimuth(p.azimuth);
    if (p.response.left.empty() || p.response.right.empty() || !all_finite(p.response.left) ||
        !all_finite(p.response.right)) {
      throw Error(Errc::kBadAudioPayload, "HRIR at az=" + format_decimal(p.azimuth) +
                                              ", el=" + format_decimal(p.elevation) +
                                              " is empty or non-finite");
    }
    const auto key = std::llround(p.elevation * 1e6);
    auto& ring = by_elevation[key];
    ring.elevation = p.elevation;
    ring.members.push_back(i);
  }

  for (auto& [key, ring] : by_elevation) {
    std::sort(ring.members.begin(), ring.members.end(),
              [&](std::size_t a, std::size_t b) { return points_[a].azimuth < points_[b].azimuth; });
    if (!is_pole(ring.elevation)) {
      double max_gap = 0.0;
      for (std::size_t j = 0; j < ring.members.size(); ++j) {
        const double here = points_[ring.members[j]].azimuth;
        const double next = j + 1 < ring.members.size() ? points_[ring.members[j + 1]].azimuth
                                                         : points_[ring.members.front()].azimuth + 360.0;
        max_gap = std::max(max_gap, next - here);
      }
      if (max_gap > kMaxAzimuthGap + kAngleEps) {
        throw Error(Errc::kGridTooSparse, "elevation ring " + format_decimal(ring.elevation) +
                                              " has an azimuth gap of " + format_decimal(max_gap) +
                                              " degrees (max 15)");
      }
    }
    rings_.push_back(std::move(ring));
  }
}

std::size_t HrirSet::max_response_length() const noexcept {
  std::size_t n = 0;
  for (const auto& p : points_) n = std::max(n, p.response.length());
  return n;
}

std::pair<InterpolationWeight, InterpolationWeight> HrirSet::ring_weights(const Ring& ring,
                                                                          double azimuth) const {
  const auto& m = ring.members;
  if (m.size() == 1) return {{m[0], 1.0}, {m[0], 0.0}};
  const double az = normalize_azimuth(azimuth);
  const auto upper = std::upper_bound(m.begin(), m.end(), az, [&](double value, std::size_t idx) {
    return value < points_[idx].azimuth;
  });
  std::size_t lo, hi;
  double lo_az, hi_az;
  if (upper == m.begin()) {
    lo = m.back();
    lo_az = points_[lo].azimuth - 360.0;
  } else {
    lo = *(upper - 1);
    lo_az = points_[lo].azimuth;
  }
  if (upper == m.end()) {
    hi = m.front();
    hi_az = points_[hi].azimuth + 360.0;
  } else {
    hi = *upper;
    hi_az = points_[hi].azimuth;
  }
  const double t = std::clamp((az - lo_az) / (hi_az - lo_az), 0.0, 1.0);
  return {{lo, 1.0 - t}, {hi, t}};
}

std::vector<InterpolationWeight> HrirSet::interpolation_weights(double azimuth, double elevation) const {
  const Ring* lo = &rings_.front();
  const Ring* hi = &rings_.front();
  double te = 0.0;
  if (elevation >= rings_.back().elevation) {
    lo = hi = &rings_.back();
  } else if (elevation > rings_.front().elevation) {
    const auto it = std::upper_bound(rings_.begin(), rings_.end(), elevation,
                                     [](double v, const Ring& r) { return v < r.elevation; });
    hi = &*it;
    lo = &*(it - 1);
    te = (elevation - lo->elevation) / (hi->elevation - lo->elevation);
  }
  const auto [a0, a1] = ring_weights(*lo, azimuth);
  const auto [b0, b1] = ring_weights(*hi, azimuth);
  std::vector<InterpolationWeight> w = {{a0.index, (1.0 - te) * a0.weight},
                                        {a1.index, (1.0 - te) * a1.weight},
                                        {b0.index, te * b0.weight},
                                        {b1.index, te * b1.weight}};
  std::stable_sort(w.begin(), w.end(), [](const auto& x, const auto& y) { return x.weight > y.weight; });
  return w;
}

HrirPair HrirSet::interpolate(double azimuth, double elevation) const {
  const std::size_t n = max_response_length();
  HrirPair out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (const auto& [index, weight] : interpolation_weights(azimuth, elevation)) {
    if (weight == 0.0) continue;
    const auto& r = points_[index].response;
    for (std::size_t i = 0; i < r.left.size(); ++i) out.left[i] += weight * r.left[i];
    for (std::size_t i = 0; i < r.right.size(); ++i) out.right[i] += weight * r.right[i];
  }
  return out;
}

HrirSet HrirSet::load(const std::filesystem::path& directory) {
  std::vector<std::pair<std::filesystem::path, std::pair<double, double>>> files;
  int sample_rate = 0;
  const auto index_path = directory / "index.json";
  if (std::filesystem::exists(index_path)) {
    std::ifstream in(index_path);
    nlohmann::json index;
    try {
      in >> index;
      sample_rate = index.at("sample_rate").get<int>();
      for (const auto& entry : index.at("entries")) {
        files.push_back({directory / entry.at("file").get<std::string>(),
                         {entry.at("azimuth").get<double>(), entry.at("elevation").get<double>()}});
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kIo, "malformed HRIR index " + index_path.string() + ": " + e.what());
    }
  } else {
    if (!std::filesystem::is_directory(directory)) {
      throw Error(Errc::kIo, "HRIR directory not found: " + directory.string());
    }
    static const std::regex kName(R"(az(-?[0-9]+(?:\.[0-9]+)?)_el(-?[0-9]+(?:\.[0-9]+)?)\.wav)");
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
      std::smatch m;
      const std::string name = entry.path().filename().string();
      if (std::regex_match(name, m, kName)) {
        files.push_back({entry.path(), {std::stod(m[1].str()), std::stod(m[2].str())}});
      }
    }
    std::sort(files.begin(), files.end());
  }
  if (files.empty()) throw Error(Errc::kGridTooSparse, "no HRIRs found in " + directory.string());

  std::vector<HrirPoint> points;
  for (const auto& [path, dir] : files) {
    const WavData wav = read_wav(path);
    if (wav.channels.size() != 2) throw Error(Errc::kBadAudioPayload, path.string() + " is not stereo");
    if (sample_rate == 0) sample_rate = wav.sample_rate;
    if (wav.sample_rate != sample_rate) {
      throw Error(Errc::kRateMismatch, path.string() + " has sample rate " +
                                           std::to_string(wav.sample_rate) + ", expected " +
                                           std::to_string(sample_rate));
    }
    points.push_back({dir.first, dir.second, {wav.channels[0], wav.channels[1]}});
  }
  return HrirSet(sample_rate, std::move(points));
}

void HrirSet::save(const std::filesystem::path& directory) const {
  std::filesystem::create_directories(directory);
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& p : points_) {
    const std::string file = response_file_name(p.azimuth, p.elevation);
    const std::size_t n = p.response.length();
    WavData wav{sample_rate_, {p.response.left, p.response.right}};
    wav.channels[0].resize(n, 0.0);
    wav.channels[1].resize(n, 0.0);
    write_wav(directory / file, wav, WavEncoding::kFloat32);
    entries.push_back({{"azimuth", p.azimuth}, {"elevation", p.elevation}, {"file", file}});
  }
  std::ofstream out(directory / "index.json");
  out << nlohmann::json{{"sample_rate", sample_rate_}, {"entries", entries}}.dump(2) << "\n";
  if (!out) throw Error(Errc::kIo, "cannot write " + (directory / "index.json").string());
}

HrirPair synthetic_hrir(double azimuth, double elevation, const SyntheticHrirOptions& options) {
  return {synthetic_ear(azimuth, elevation, -1.0, options), synthetic_ear(azimuth, elevation, +1.0, options)};
}

HrirSet make_synthetic_hrir_set(const SyntheticHrirOptions& options) {
  std::vector<HrirPoint> points;
  for (double el : options.elevations) {
    if (is_pole(el)) {
      points.push_back({0.0, el, synthetic_hrir(0.0, el, options)});
      continue;
    }
    const auto steps = static_cast<int>(std::llround(360.0 / options.azimuth_step));
    for (int i = 0; i < steps; ++i) {
      const double az = normalize_azimuth(-180.0 + i * options.azimuth_step);
      points.push_back({az, el, synthetic_hrir(az, el, options)});
    }
  }
  return HrirSet(options.sample_rate, std::move(points));
}

}  // namespace earshot
