#include "earshot/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "earshot/error.hpp"

namespace earshot {

void Timeline::add(BinauralClip clip, double start_time, std::string label) {
  placements_.push_back({std::move(clip), start_time, std::move(label)});
}

std::size_t Timeline::start_sample(const Placement& placement) const noexcept {
  return static_cast<std::size_t>(std::llround(std::max(0.0, placement.start_time) * sample_rate_));
}

std::size_t Timeline::total_length() const noexcept {
  std::size_t total = 0;
  for (const auto& p : placements_) {
    total = std::max(total, start_sample(p) + std::max(p.clip.left.size(), p.clip.right.size()));
  }
  return total;
}

MixResult mix(const Timeline& timeline) {
  const auto& placements = timeline.placements();
  for (std::size_t i = 0; i < placements.size(); ++i) {
    const auto& clip = placements[i].clip;
    if (clip.sample_rate != timeline.sample_rate()) {
      throw Error(Errc::kSampleRateMismatch,
                  "placement " + std::to_string(i) + " has rate " + std::to_string(clip.sample_rate) +
                      ", timeline has " + std::to_string(timeline.sample_rate()));
    }
  }

  std::vector<std::size_t> order(placements.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return timeline.start_sample(placements[a]) < timeline.start_sample(placements[b]);
  });

  MixResult result;
  const std::size_t total = timeline.total_length();
  result.output.sample_rate = timeline.sample_rate();
  result.output.left.assign(total, 0.0);
  result.output.right.assign(total, 0.0);
  result.event_peaks.resize(placements.size());

  for (std::size_t idx : order) {
    const auto& p = placements[idx];
    const std::size_t s0 = timeline.start_sample(p);
    for (std::size_t i = 0; i < p.clip.left.size(); ++i) result.output.left[s0 + i] += p.clip.left[i];
    for (std::size_t i = 0; i < p.clip.right.size(); ++i) result.output.right[s0 + i] += p.clip.right[i];
    result.event_peaks[idx] = std::max(peak_abs(p.clip.left), peak_abs(p.clip.right));
  }

  result.peak_before = std::max(peak_abs(result.output.left), peak_abs(result.output.right));
  if (result.peak_before > 1.0) {
    result.gain = 0.99 / result.peak_before;
    for (auto& v : result.output.left) v *= result.gain;
    for (auto& v : result.output.right) v *= result.gain;
  }
  return result;
}

std::string mix_report_json(const Timeline& timeline, const MixResult& result, int indent) {
  nlohmann::json events = nlohmann::json::array();
  const auto& placements = timeline.placements();
  for (std::size_t i = 0; i < placements.size(); ++i) {
    const auto& p = placements[i];
    events.push_back({{"label", p.label},
                      {"start_time", p.start_time},
                      {"start_sample", timeline.start_sample(p)},
                      {"length", p.clip.left.size()},
                      {"peak", i < result.event_peaks.size() ? result.event_peaks[i] : 0.0}});
  }
  nlohmann::json report = {{"sample_rate", timeline.sample_rate()},
                           {"timeline_length", result.output.left.size()},
                           {"duration_s", static_cast<double>(result.output.left.size()) / timeline.sample_rate()},
                           {"peak_before_gain", result.peak_before},
                           {"gain", result.gain},
                           {"events", std::move(events)}};
  return report.dump(indent);
}

}  // namespace earshot
