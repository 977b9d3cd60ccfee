#include "earshot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "earshot/dsp.hpp"
#include "earshot/error.hpp"
#include "earshot/fft.hpp"
#include "earshot/scene.hpp"

namespace earshot {
namespace {

constexpr double kMagFloor = 1e-7;
constexpr double kEnergyEps = 1e-10;

using Spectrogram = std::vector<std::vector<Complex>>;

double rms_difference(std::span<const double> a, std::span<const double> b) {
  if (a.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

double phase_term(const Spectrogram& x, const Spectrogram& y, double gate_linear, double window_sum) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < y.size(); ++f) {
    for (std::size_t k = 0; k < y[f].size(); ++k) {
      if (std::abs(y[f][k]) * 2.0 / window_sum <= gate_linear) continue;
      acc += std::abs(std::arg(x[f][k] * std::conj(y[f][k])));
      ++count;
    }
  }
  return count == 0 ? 0.0 : acc / static_cast<double>(count);
}

double magnitude_term(const Spectrogram& x, const Spectrogram& y) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < y.size(); ++f) {
    for (std::size_t k = 0; k < y[f].size(); ++k) {
      acc += std::abs(std::abs(x[f][k]) - std::abs(y[f][k]));
      ++count;
    }
  }
  return count == 0 ? 0.0 : acc / static_cast<double>(count);
}

double stft_term(const Spectrogram& x, const Spectrogram& y) {
  double diff2 = 0.0, ref2 = 0.0, log_acc = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < y.size(); ++f) {
    for (std::size_t k = 0; k < y[f].size(); ++k) {
      const double mx = std::max(std::abs(x[f][k]), kMagFloor);
      const double my = std::max(std::abs(y[f][k]), kMagFloor);
      diff2 += (my - mx) * (my - mx);
      ref2 += my * my;
      log_acc += std::abs(std::log(my) - std::log(mx));
      ++count;
    }
  }
  const double convergence = diff2 == 0.0 ? 0.0 : std::sqrt(diff2) / std::sqrt(ref2);
  return convergence + (count == 0 ? 0.0 : log_acc / static_cast<double>(count));
}

std::vector<double> frame_iid(const BinauralClip& clip, std::size_t frame) {
  std::vector<double> out;
  const std::size_t n = clip.left.size();
  for (std::size_t s = 0; s < n; s += frame) {
    const std::size_t len = std::min(frame, n - s);
    const double el = energy(std::span(clip.left).subspan(s, len));
    const double er = energy(std::span(clip.right).subspan(s, len));
    out.push_back(10.0 * std::log10((el + kEnergyEps) / (er + kEnergyEps)));
  }
  return out;
}

}  // namespace

void MetricConfig::validate() const {
  for (double w : {lambda_l2, lambda_phase, lambda_iid, lambda_stft}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(Errc::kInvalidConfig, "metric weights must be finite and >= 0");
  }
  if (resolutions.size() < 2) throw Error(Errc::kInvalidConfig, "at least two STFT resolutions are required");
  auto check = [](const StftResolution& r) {
    if (r.fft_size < 2 || !is_power_of_two(r.fft_size) || r.hop == 0 || r.hop > r.fft_size) {
      throw Error(Errc::kInvalidConfig, "STFT resolution " + std::to_string(r.fft_size) + "/" +
                                            std::to_string(r.hop) + " is invalid");
    }
  };
  for (const auto& r : resolutions) check(r);
  check(analysis);
  if (iid_frame == 0) throw Error(Errc::kInvalidConfig, "IID frame length must be > 0");
}

Spectrogram stft(std::span<const double> x, StftResolution res) {
  const std::size_t n = res.fft_size;
  const std::size_t frames = x.size() <= n ? 1 : 1 + (x.size() - n + res.hop - 1) / res.hop;
  const auto window = hann_window(n);
  RealFft fft(n);
  std::vector<double> buf(n);
  Spectrogram out(frames, std::vector<Complex>(fft.bins()));
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * res.hop;
    for (std::size_t j = 0; j < n; ++j) {
      buf[j] = start + j < x.size() ? window[j] * x[start + j] : 0.0;
    }
    fft.forward(buf, out[f]);
  }
  return out;
}

MetricReport eval_pair(const BinauralClip& pred, const BinauralClip& ref, const MetricConfig& cfg) {
  cfg.validate();
  if (pred.sample_rate != ref.sample_rate) {
    throw Error(Errc::kRateMismatch, "sample rates differ: " + std::to_string(pred.sample_rate) + " vs " +
                                         std::to_string(ref.sample_rate));
  }
  const std::size_t n = ref.left.size();
  if (ref.right.size() != n || pred.left.size() != n || pred.right.size() != n) {
    throw Error(Errc::kLengthMismatch, "prediction and reference must share one channel length");
  }

  MetricReport report;
  const double gate = std::pow(10.0, cfg.phase_gate_db / 20.0);
  const auto window = hann_window(cfg.analysis.fft_size);
  double window_sum = 0.0;
  for (double w : window) window_sum += w;

  for (int ch = 0; ch < 2; ++ch) {
    const auto& x = pred.channel(ch);
    const auto& y = ref.channel(ch);
    report.l2 += rms_difference(x, y) / 2.0;
    const auto sx = stft(x, cfg.analysis);
    const auto sy = stft(y, cfg.analysis);
    report.phase += phase_term(sx, sy, gate, window_sum) / 2.0;
    report.magnitude += magnitude_term(sx, sy) / 2.0;
    for (const auto& res : cfg.resolutions) {
      report.stft += stft_term(stft(x, res), stft(y, res)) / 2.0;
    }
  }

  const auto iid_pred = frame_iid(pred, cfg.iid_frame);
  const auto iid_ref = frame_iid(ref, cfg.iid_frame);
  report.iid = rms_difference(iid_pred, iid_ref);

  report.total = cfg.lambda_l2 * report.l2 + cfg.lambda_phase * report.phase +
                 cfg.lambda_iid * report.iid + cfg.lambda_stft * report.stft;
  return report;
}

std::string MetricReport::to_json(int indent) const {
  nlohmann::json j = {{"l2", l2},       {"L_phs", phase},        {"L_IID", iid},
                      {"L_STFT", stft}, {"L_mag", magnitude}, {"total", total}};
  return j.dump(indent);
}

std::string MetricReport::csv_header() { return "l2,L_phs,L_IID,L_STFT,L_mag,total"; }

std::string MetricReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << l2 << ',' << phase << ',' << iid << ',' << stft << ',' << magnitude << ',' << total;
  return os.str();
}

}  // namespace earshot
