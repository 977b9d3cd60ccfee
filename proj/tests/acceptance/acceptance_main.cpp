// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "earshot/error.hpp"
#include "earshot/hrir.hpp"
#include "earshot/localization.hpp"
#include "earshot/metrics.hpp"
#include "earshot/mixer.hpp"
#include "earshot/pipeline.hpp"
#include "earshot/reference.hpp"
#include "earshot/renderer.hpp"
#include "earshot/scene.hpp"
#include "earshot/source_provider.hpp"
#include "earshot/spatializer.hpp"

#include "../oracles.hpp"

namespace {

using namespace earshot;
using Clock = std::chrono::steady_clock;

constexpr int kFs = 16000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

MonoClip noise_clip(double seconds, std::uint64_t seed) {
  return synth_test_signal(SignalKind::kNoise, seconds, kFs, seed);
}

SourcePose pose_at(double az, double el, double d) {
  SceneEvent e;
  e.azimuth = az;
  e.elevation = el;
  e.distance = d;
  return event_pose(e);
}

BinauralClip render_parametric(const MonoClip& clip, const SourcePose& pose, FramePlan plan = {}) {
  const auto field = parametric_field(pose, plan.frame_count(clip.samples.size()), plan.fft_size, kFs);
  return render_event(clip, field, plan.with_pad_for(field));
}

Outcome wola_identity() {
  const auto clip = noise_clip(1.0, 11);
  const auto t0 = Clock::now();
  const auto out = wola_roundtrip(clip, FramePlan{});
  const double elapsed = seconds_since(t0);
  double max_err = 0.0;
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    max_err = std::max(max_err, std::abs(out.samples[i] - clip.samples[i]));
  }
  return {max_err < 1e-6 && elapsed < 0.1, "max|err|=" + fmt(max_err) + " runtime=" + fmt(elapsed) + "s"};
}

Outcome fourier_shift() {
  FramePlan plan;
  // Integer delay: impulse train against an explicit shift.
  const std::size_t n = 8000;
  MonoClip train{std::vector<double>(n, 0.0), kFs};
  for (std::size_t i = 100; i < n; i += 397) train.samples[i] = 1.0;
  double worst_int = 0.0;
  for (double delay : {1.0, 7.0, 40.0}) {
    const auto field = constant_field(plan.frame_count(n), plan.fft_size, 1.0, delay);
    const auto out = render_event(train, field, plan.with_pad_for(field));
    const auto d = static_cast<std::size_t>(delay);
    for (std::size_t i = 0; i < n; ++i) {
      const double expected = i >= d ? train.samples[i - d] : 0.0;
      worst_int = std::max({worst_int, std::abs(out.left[i] - expected), std::abs(out.right[i] - expected)});
    }
  }

  // Fractional delay D = 2.5 on band-limited noise against a time-domain windowed sinc.
  const double delay = 2.5;
  MonoClip noise{oracle::bandlimited_noise(n, 0.35, 5), kFs};
  const auto field = constant_field(plan.frame_count(n), plan.fft_size, 1.0, delay);
  const auto out = render_event(noise, field, plan.with_pad_for(field));
  const auto expected = oracle::fractional_delay(noise.samples, delay, n);
  const std::size_t edge = 256;
  const std::span<const double> ref(expected.data() + edge, n - 2 * edge);
  const std::span<const double> got(out.left.data() + edge, n - 2 * edge);
  const double snr = oracle::snr_db(ref, got);
  return {worst_int < 1e-9 && snr > 60.0,
          "integer max|err|=" + fmt(worst_int) + " fractional SNR=" + fmt(snr) + "dB"};
}

Outcome inverse_square() {
  const auto clip = noise_clip(1.0, 3);
  const double d = 2.0;
  const auto near = render_parametric(clip, pose_at(0.0, 0.0, d));
  const auto far = render_parametric(clip, pose_at(0.0, 0.0, 2.0 * d));
  double ratio_sum = 0.0;
  std::string detail;
  bool pass = true;
  for (int ch = 0; ch < 2; ++ch) {
    const double e_near = oracle::band_energy(near.channel(ch), kFs, 200.0, 6000.0);
    const double e_far = oracle::band_energy(far.channel(ch), kFs, 200.0, 6000.0);
    const double ratio = e_near / e_far;
    ratio_sum += ratio;
    pass = pass && std::abs(ratio - 4.0) <= 0.04;
    detail += std::string(ch == 0 ? "L" : " R") + " ratio=" + fmt(ratio);
  }
  return {pass, detail};
}

Outcome itd() {
  const auto clip = noise_clip(1.0, 9);
  const auto out = render_parametric(clip, pose_at(90.0, 0.0, 1.5));
  const double expected = oracle::woodworth_itd_seconds(oracle::kPi / 2.0, 0.0875, 343.0) * kFs;
  const double lag = oracle::xcorr_peak_lag(out.left, out.right, 32);
  return {std::abs(lag - expected) <= 1.0,
          "lag=" + fmt(lag) + " samples, Woodworth=" + fmt(expected) + " (" + fmt(expected / kFs * 1e3) + " ms)"};
}

Outcome loss_suite() {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(2048, 12000);
  // Weights as published: lambda_1 = 10^3, lambda_3 = 10^1, lambda_2 = lambda_4 = 1.
  const double l1 = 1e3, l2 = 1.0, l3 = 10.0, l4 = 1.0;
  MetricConfig cfg;
  bool defaults_ok = cfg.lambda_l2 == l1 && cfg.lambda_phase == l2 && cfg.lambda_iid == l3 && cfg.lambda_stft == l4;
  bool zeros = true;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    BinauralClip x;
    x.sample_rate = kFs;
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) {
      x.left.push_back(amp(rng));
      x.right.push_back(0.5 * amp(rng));
    }
    const auto r = eval_pair(x, x, cfg);
    zeros = zeros && r.l2 == 0.0 && r.phase == 0.0 && r.iid == 0.0 && r.stft == 0.0 && r.magnitude == 0.0 &&
            r.total == 0.0;

    // Weighted-sum structure on a perturbed pair, where every term is non-zero.
    BinauralClip y = x;
    for (std::size_t i = 0; i < n; ++i) y.left[i] *= 0.9 + 0.05 * std::sin(0.01 * static_cast<double>(i));
    const auto p = eval_pair(y, x, cfg);
    const double expected = l1 * p.l2 + l2 * p.phase + l3 * p.iid + l4 * p.stft;
    worst_rel = std::max(worst_rel, std::abs(p.total - expected) / std::abs(expected));
  }
  return {defaults_ok && zeros && worst_rel <= 1e-12,
          std::string("identity zeros=") + (zeros ? "yes" : "no") + " defaults=" + (defaults_ok ? "yes" : "no") +
              " max rel(total)=" + fmt(worst_rel)};
}

Outcome direction_grid() {
  const auto t0 = Clock::now();
  int correct = 0, total = 0;
  std::uint64_t seed = 100;
  for (double az : {-150.0, -120.0, -90.0, -60.0, -30.0, 30.0, 60.0, 90.0, 120.0, 150.0}) {
    for (double el : {-45.0, 0.0, 45.0}) {
      const auto clip = noise_clip(1.0, seed++);
      const auto est = estimate_direction(render_parametric(clip, pose_at(az, el, 1.5)));
      const Lateral truth = az < 0.0 ? Lateral::kLeft : Lateral::kRight;
      correct += est.lateral == truth ? 1 : 0;
      ++total;
    }
  }
  const double elapsed = seconds_since(t0);
  const double accuracy = static_cast<double>(correct) / total;
  return {accuracy >= 0.95 && elapsed < 30.0, "left/right " + std::to_string(correct) + "/" + std::to_string(total) +
                                                  " = " + fmt(accuracy * 100) + "% runtime=" + fmt(elapsed) + "s"};
}

Outcome mixer_and_determinism() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_int_distribution<std::size_t> len(100, 4000);
  std::uniform_real_distribution<double> start(0.0, 0.3), val(-0.1, 0.1);
  bool superposition = true;
  for (int trial = 0; trial < 50; ++trial) {
    Timeline all(kFs);
    std::vector<Timeline> singles;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      BinauralClip c;
      c.sample_rate = kFs;
      const std::size_t l = len(rng);
      for (std::size_t j = 0; j < l; ++j) {
        c.left.push_back(val(rng));
        c.right.push_back(val(rng));
      }
      const double s = start(rng);
      all.add(c, s);
      singles.emplace_back(kFs);
      singles.back().add(c, s);
    }
    const auto mixed = mix(all);
    if (mixed.gain != 1.0) continue;
    // Sum the individual mixes in the same ascending-start order the mixer uses.
    std::vector<std::size_t> order(singles.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return singles[a].start_sample(singles[a].placements()[0]) < singles[b].start_sample(singles[b].placements()[0]);
    });
    std::vector<double> left(mixed.output.left.size(), 0.0), right(left.size(), 0.0);
    for (std::size_t i : order) {
      const auto m = mix(singles[i]).output;
      for (std::size_t j = 0; j < m.left.size(); ++j) {
        left[j] += m.left[j];
        right[j] += m.right[j];
      }
    }
    superposition = superposition && left == mixed.output.left && right == mixed.output.right;
  }

  const auto dir = std::filesystem::temp_directory_path() / "earshot_acceptance_determinism";
  std::filesystem::create_directories(dir);
  auto run = [&](const std::string& name) {
    RunConfig cfg;
    cfg.prose = "a dog barks on the lower left for 2 seconds, then a bird chirps upper right for 1 second";
    cfg.out_path = (dir / name).string();
    cfg.workers = 3;
    cfg.seed = 4;
    run_render(cfg);
    std::ifstream in(cfg.out_path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const auto a = run("a.wav");
  const auto b = run("b.wav");
  const bool identical = !a.empty() && a == b;
  std::filesystem::remove_all(dir);
  return {superposition && identical, std::string("superposition=") + (superposition ? "exact" : "MISMATCH") +
                                          " pipeline bytes identical=" + (identical ? "yes" : "no") + " (" +
                                          std::to_string(a.size()) + " bytes)"};
}

Outcome parser_corpus() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> dur(0.01, 30.0), az(-180.0, 179.999), el(-90.0, 90.0), dist(0.05, 100.0),
      start(0.0, 600.0);
  const std::vector<std::string> words = {"dog", "rain on a tin roof", "car horn", "bird song", "footsteps",
                                          "church bell", "distant thunder", "wind, gusting"};
  int lossless = 0;
  for (int i = 0; i < 200; ++i) {
    SceneEvent e;
    e.label = words[static_cast<std::size_t>(i) % words.size()] + " " + std::to_string(i);
    e.duration = dur(rng);
    e.azimuth = az(rng);
    e.elevation = el(rng);
    e.distance = dist(rng);
    e.start_time = i % 5 == 0 ? 0.0 : start(rng);
    const std::string line = serialize_event(e);
    const SceneEvent back = parse_scene_line(line);
    if (back == e && serialize_event(back) == line) ++lossless;
  }

  struct Bad {
    std::string line;
    Errc code;
  };
  const std::vector<Bad> bad = {
      {"dog@1@0, 0@1", Errc::kFieldCount},
      {"dog@1@0, 0@1@0@9", Errc::kFieldCount},
      {"dog@1@0@1@0", Errc::kFieldCount},
      {"dog@1@0, 0, 5@1@0", Errc::kFieldCount},
      {"dog", Errc::kFieldCount},
      {"dog@one@0, 0@1@0", Errc::kNumberParse},
      {"dog@1@left, 0@1@0", Errc::kNumberParse},
      {"dog@1@0, up@1@0", Errc::kNumberParse},
      {"dog@1@0, 0@far@0", Errc::kNumberParse},
      {"dog@1@0, 0@1@soon", Errc::kNumberParse},
      {"dog@1e3@0, 0@1@0", Errc::kNumberParse},
      {"dog@nan@0, 0@1@0", Errc::kNumberParse},
      {"dog@@0, 0@1@0", Errc::kNumberParse},
      {"dog@0@0, 0@1@0", Errc::kRangeViolation},
      {"dog@-2@0, 0@1@0", Errc::kRangeViolation},
      {"dog@1@0, 91@1@0", Errc::kRangeViolation},
      {"dog@1@0, -90.5@1@0", Errc::kRangeViolation},
      {"dog@1@0, 0@0@0", Errc::kRangeViolation},
      {"dog@1@0, 0@1@-1", Errc::kRangeViolation},
      {" @1@0, 0@1@0", Errc::kRangeViolation},
  };
  int typed = 0;
  for (const auto& b : bad) {
    try {
      parse_scene_line(b.line);
    } catch (const ParseError& e) {
      if (e.code() == b.code) ++typed;
    }
  }
  return {lossless == 200 && typed == static_cast<int>(bad.size()),
          "round-trip " + std::to_string(lossless) + "/200, typed errors " + std::to_string(typed) + "/" +
              std::to_string(bad.size())};
}

Outcome hrir_backend() {
  const auto set = make_synthetic_hrir_set();
  FramePlan plan;
  const SpatialConstants constants;
  double worst_mag = 0.0, worst_delay = 0.0;
  bool unit_weight = true;
  for (const auto& [az, el] : std::vector<std::pair<double, double>>{{0, 0}, {90, 0}, {-45, 30}, {135, -15}}) {
    const auto weights = set.interpolation_weights(az, el);
    unit_weight = unit_weight && std::abs(weights[0].weight - 1.0) < 1e-12;
    const auto& stored = set.points()[weights[0].index].response;
    const double d = 2.0;
    const auto field = hrir_field(pose_at(az, el, d), 3, plan.fft_size, set, constants);
    const double g = d * kFs / constants.speed_of_sound;
    const double distance_gain = constants.reference_distance * kFs / constants.speed_of_sound / g;
    for (Ear ear : kEars) {
      const auto& h = ear == Ear::kLeft ? stored.left : stored.right;
      const auto H = oracle::dft(h, plan.fft_size);
      double num = 0.0, den = 0.0;
      for (std::size_t n = 0; n < h.size(); ++n) {
        num += static_cast<double>(n) * h[n] * h[n];
        den += h[n] * h[n];
      }
      const auto scale = field.scale(1, ear);
      const auto shift = field.raw_shift(1, ear);
      for (std::size_t k = 0; k < field.bins(); ++k) {
        const double expect = std::abs(H[k]);
        worst_mag = std::max(worst_mag, std::abs(scale[k] / distance_gain - expect) / std::max(expect, 1e-12));
        worst_delay = std::max(worst_delay, std::abs(shift[k] - num / den));
      }
    }
  }

  // Renderer against time-domain reference at az=0, and against a mismatched az=90 reference.
  const auto clip = noise_clip(1.0, 31);
  auto render_hrir = [&](double az) {
    const auto pose = pose_at(az, 0.0, 1.5);
    const auto field = hrir_field(pose, plan.frame_count(clip.samples.size()), plan.fft_size, set, constants);
    return render_event(clip, field, plan.with_pad_for(field));
  };
  auto trim = [](BinauralClip c, std::size_t n) {
    c.left.resize(n);
    c.right.resize(n);
    return c;
  };
  const auto rendered = render_hrir(0.0);
  const auto ref0 = reference_render(clip, pose_at(0.0, 0.0, 1.5), set);
  const auto ref90 = reference_render(clip, pose_at(90.0, 0.0, 1.5), set);
  const std::size_t n = std::min({rendered.left.size(), ref0.left.size(), ref90.left.size()});
  const double matched = eval_pair(trim(rendered, n), trim(ref0, n)).magnitude;
  const double mismatched = eval_pair(trim(rendered, n), trim(ref90, n)).magnitude;
  return {unit_weight && worst_mag < 1e-9 && worst_delay < 1e-9 && matched < mismatched,
          "on-grid max rel|H| err=" + fmt(worst_mag) + " delay err=" + fmt(worst_delay) +
              "; L_mag az0=" + fmt(matched) + " < mismatched az90=" + fmt(mismatched)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 WOLA identity", wola_identity},
      {"2 Fourier-shift oracle", fourier_shift},
      {"3 Inverse-square law", inverse_square},
      {"4 ITD correctness", itd},
      {"5 Loss suite", loss_suite},
      {"6 Direction oracle closed loop", direction_grid},
      {"7 Mixer superposition and determinism", mixer_and_determinism},
      {"8 Parser corpus", parser_corpus},
      {"9 HRIR backend", hrir_backend},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
