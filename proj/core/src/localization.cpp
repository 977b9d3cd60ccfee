#include "earshot/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "earshot/dsp.hpp"
#include "earshot/error.hpp"
#include "earshot/fft.hpp"

namespace earshot {
namespace {

constexpr std::size_t kFeatureFft = 512;
constexpr double kFeatureLowHz = 300.0;
constexpr double kFeatureHighHz = 7500.0;
constexpr double kItdPenalty = 0.5;  // per squared sample of lag mismatch

struct EarFeatures {
  std::vector<double> left;   // dB per bin within the feature band
  std::vector<double> right;
};

std::pair<std::size_t, std::size_t> feature_band(int sample_rate) {
  const double bin_hz = static_cast<double>(sample_rate) / kFeatureFft;
  const auto lo = static_cast<std::size_t>(std::ceil(kFeatureLowHz / bin_hz));
  const auto hi = std::min(static_cast<std::size_t>(kFeatureHighHz / bin_hz), kFeatureFft / 2 - 1);
  return {lo, std::max(lo, hi)};
}

// Welch-averaged power spectrum in dB over the feature band.
std::vector<double> clip_spectrum_db(std::span<const double> x, int sample_rate) {
  const auto window = hann_window(kFeatureFft);
  const auto [lo, hi] = feature_band(sample_rate);
  RealFft fft(kFeatureFft);
  std::vector<double> buf(kFeatureFft);
  std::vector<Complex> spec(fft.bins());
  std::vector<double> power(fft.bins(), 0.0);
  const std::size_t hop = kFeatureFft / 2;
  for (std::size_t s = 0; s + kFeatureFft <= x.size(); s += hop) {
    for (std::size_t j = 0; j < kFeatureFft; ++j) buf[j] = window[j] * x[s + j];
    fft.forward(buf, spec);
    for (std::size_t k = 0; k < spec.size(); ++k) power[k] += std::norm(spec[k]);
  }
  std::vector<double> out;
  for (std::size_t k = lo; k <= hi; ++k) out.push_back(10.0 * std::log10(power[k] + 1e-20));
  return out;
}

std::vector<double> response_spectrum_db(std::span<const double> h, int sample_rate) {
  const auto [lo, hi] = feature_band(sample_rate);
  const std::size_t n = std::max(kFeatureFft, next_power_of_two(h.size()));
  RealFft fft(n);
  std::vector<double> buf(n, 0.0);
  std::copy(h.begin(), h.end(), buf.begin());
  std::vector<Complex> spec(fft.bins());
  fft.forward(buf, spec);
  const std::size_t step = n / kFeatureFft;
  std::vector<double> out;
  for (std::size_t k = lo; k <= hi; ++k) out.push_back(10.0 * std::log10(std::norm(spec[k * step]) + 1e-20));
  return out;
}

double centroid(std::span<const double> h) {
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    num += static_cast<double>(n) * h[n] * h[n];
    den += h[n] * h[n];
  }
  return den > 0.0 ? num / den : 0.0;
}

// Squared distance after removing the common level offset shared by both ears.
double spectral_distance(const EarFeatures& clip, const EarFeatures& tmpl) {
  const std::size_t n = clip.left.size();
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) mean += (clip.left[k] - tmpl.left[k]) + (clip.right[k] - tmpl.right[k]);
  mean /= static_cast<double>(2 * n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dl = clip.left[k] - tmpl.left[k] - mean;
    const double dr = clip.right[k] - tmpl.right[k] - mean;
    acc += dl * dl + dr * dr;
  }
  return acc / static_cast<double>(2 * n);
}

}  // namespace

std::string to_string(Lateral value) {
  switch (value) {
    case Lateral::kLeft: return "left";
    case Lateral::kRight: return "right";
    case Lateral::kCenter: return "center";
  }
  return "center";
}

std::string to_string(FrontRear value) {
  switch (value) {
    case FrontRear::kFront: return "front";
    case FrontRear::kRear: return "rear";
    case FrontRear::kUnknown: return "unknown";
  }
  return "unknown";
}

std::string to_string(Vertical value) {
  switch (value) {
    case Vertical::kAbove: return "above";
    case Vertical::kBelow: return "below";
    case Vertical::kLevel: return "level";
    case Vertical::kUnknown: return "unknown";
  }
  return "unknown";
}

std::string DirectionEstimate::to_json(int indent) const {
  nlohmann::json j = {{"lateral", to_string(lateral)},
                      {"front_rear", to_string(front_rear)},
                      {"vertical", to_string(vertical)},
                      {"confidence", confidence},
                      {"lag_samples", lag_samples},
                      {"ild_db", ild_db}};
  if (template_matched) {
    j["template"] = {{"azimuth", template_azimuth}, {"elevation", template_elevation}};
  }
  return j.dump(indent);
}

DirectionEstimate estimate_direction(const BinauralClip& clip, const HrirSet* templates) {
  const std::size_t n = std::min(clip.left.size(), clip.right.size());
  if (clip.sample_rate <= 0 || static_cast<double>(n) < 0.25 * clip.sample_rate) {
    throw Error(Errc::kTooShort, "direction estimation needs at least 0.25 s of audio");
  }
  const std::span<const double> left(clip.left.data(), n), right(clip.right.data(), n);

  DirectionEstimate est;
  const int max_lag = static_cast<int>(std::floor(1e-3 * clip.sample_rate));
  est.lag_samples = gcc_phat(left, right, max_lag).lag;
  const double el = energy(left), er = energy(right);
  est.ild_db = 10.0 * std::log10((er + 1e-20) / (el + 1e-20));

  const double full_scale_lag = 0.3e-3 * clip.sample_rate;
  if (std::abs(est.lag_samples) >= 0.5) {
    est.lateral = est.lag_samples > 0.0 ? Lateral::kRight : Lateral::kLeft;
    est.confidence = 0.5 + 0.5 * std::min(1.0, std::abs(est.lag_samples) / full_scale_lag);
  } else if (std::abs(est.ild_db) >= 1.0) {
    est.lateral = est.ild_db > 0.0 ? Lateral::kRight : Lateral::kLeft;
    est.confidence = 0.5 + 0.25 * std::min(1.0, std::abs(est.ild_db) / 10.0);
  } else {
    est.lateral = Lateral::kCenter;
    est.confidence = 0.5;
  }

  if (templates == nullptr || templates->points().empty()) return est;
  if (templates->sample_rate() != clip.sample_rate) {
    throw Error(Errc::kRateMismatch, "template set rate differs from the clip rate");
  }

  const EarFeatures features{clip_spectrum_db(left, clip.sample_rate), clip_spectrum_db(right, clip.sample_rate)};
  double best = std::numeric_limits<double>::infinity();
  const HrirPoint* best_point = nullptr;
  for (const auto& point : templates->points()) {
    const EarFeatures tmpl{response_spectrum_db(point.response.left, clip.sample_rate),
                           response_spectrum_db(point.response.right, clip.sample_rate)};
    const double itd = centroid(point.response.left) - centroid(point.response.right);
    const double lag_err = est.lag_samples - itd;
    const double d = spectral_distance(features, tmpl) + kItdPenalty * lag_err * lag_err;
    if (d < best) {
      best = d;
      best_point = &point;
    }
  }
  est.template_matched = true;
  est.template_azimuth = best_point->azimuth;
  est.template_elevation = best_point->elevation;
  const double abs_az = std::abs(best_point->azimuth);
  est.front_rear = abs_az < 90.0 ? FrontRear::kFront : abs_az > 90.0 ? FrontRear::kRear : FrontRear::kUnknown;
  est.vertical = best_point->elevation > 0.0   ? Vertical::kAbove
                 : best_point->elevation < 0.0 ? Vertical::kBelow
                                               : Vertical::kLevel;
  return est;
}

}  // namespace earshot
