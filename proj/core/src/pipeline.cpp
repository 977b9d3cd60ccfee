#include "earshot/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "earshot/hrir.hpp"
#include "earshot/renderer.hpp"
#include "earshot/segmenter.hpp"
#include "earshot/source_provider.hpp"
#include "earshot/spatializer.hpp"
#include "earshot/wav.hpp"

namespace earshot {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

template <typename F>
auto in_stage(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  } catch (const std::exception& e) {
    throw StageError(stage, Error(Errc::kIo, e.what()));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write " + path);
  out << bytes;
  if (!out) throw Error(Errc::kIo, "write to " + path + " failed");
}

struct EventResult {
  BinauralClip clip;
  std::optional<StageError> error;
  double source_s = 0.0, spatial_s = 0.0, render_s = 0.0;
};

}  // namespace

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.code(), cause.what()), stage_(std::move(stage)) {}

std::string StageError::to_json() const {
  return json{{"error", {{"stage", stage_}, {"code", std::string(name())}, {"message", what()}}}}.dump();
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::kInvalidConfig, msg); };
  if (scene_path.empty() && prose.empty()) fail("either a scene file or prose is required");
  if (hop == 0 || !is_power_of_two(fft_size) || fft_size < 2 * hop) {
    fail("FFT size must be a power of two >= 2 * hop");
  }
  if (sample_rate <= 0) fail("sample rate must be positive");
  if (!(service_timeout > 0.0)) fail("service timeout must be positive");
  if (spatializer != "parametric" && !spatializer.starts_with("hrir:")) {
    fail("spatializer must be 'parametric' or 'hrir:<dir>'");
  }
  if (!(constants.head_radius > 0.0) || !(constants.speed_of_sound > 0.0) ||
      !(constants.distance_floor > 0.0) || !(constants.reference_distance > 0.0)) {
    fail("spatial constants must be positive");
  }
  metrics.validate();
}

std::string RunConfig::to_json(int indent) const {
  json resolutions = json::array();
  for (const auto& r : metrics.resolutions) resolutions.push_back({r.fft_size, r.hop});
  json j = {
      {"scene", scene_path},
      {"prose", prose},
      {"segmenter", segmenter},
      {"source", source},
      {"spatializer", spatializer},
      {"out", out_path},
      {"report", report_path},
      {"defaults_table", defaults_table_path},
      {"dump_spectra", dump_spectra_dir},
      {"fft", fft_size},
      {"hop", hop},
      {"workers", workers},
      {"seed", seed},
      {"pcm16", pcm16},
      {"sample_rate", sample_rate},
      {"service_timeout", service_timeout},
      {"constants",
       {{"head_radius", constants.head_radius},
        {"speed_of_sound", constants.speed_of_sound},
        {"distance_floor", constants.distance_floor},
        {"reference_distance", constants.reference_distance}}},
      {"metrics",
       {{"lambda", {metrics.lambda_l2, metrics.lambda_phase, metrics.lambda_iid, metrics.lambda_stft}},
        {"resolutions", resolutions},
        {"iid_frame", metrics.iid_frame},
        {"phase_gate_db", metrics.phase_gate_db}}},
  };
  return j.dump(indent);
}

void RunConfig::merge_json(std::string_view json_text) {
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw Error(Errc::kInvalidConfig, "config must be a JSON object");
    auto take = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    take("scene", scene_path);
    take("prose", prose);
    take("segmenter", segmenter);
    take("source", source);
    take("spatializer", spatializer);
    take("out", out_path);
    take("report", report_path);
    take("defaults_table", defaults_table_path);
    take("dump_spectra", dump_spectra_dir);
    take("fft", fft_size);
    take("hop", hop);
    take("workers", workers);
    take("seed", seed);
    take("pcm16", pcm16);
    take("sample_rate", sample_rate);
    take("service_timeout", service_timeout);
    if (j.contains("constants")) {
      const auto& c = j.at("constants");
      if (c.contains("head_radius")) c.at("head_radius").get_to(constants.head_radius);
      if (c.contains("speed_of_sound")) c.at("speed_of_sound").get_to(constants.speed_of_sound);
      if (c.contains("distance_floor")) c.at("distance_floor").get_to(constants.distance_floor);
      if (c.contains("reference_distance")) c.at("reference_distance").get_to(constants.reference_distance);
    }
    if (j.contains("metrics")) {
      const auto& m = j.at("metrics");
      if (m.contains("lambda")) {
        const auto l = m.at("lambda").get<std::vector<double>>();
        if (l.size() != 4) throw Error(Errc::kInvalidConfig, "metrics.lambda needs 4 weights");
        metrics.lambda_l2 = l[0];
        metrics.lambda_phase = l[1];
        metrics.lambda_iid = l[2];
        metrics.lambda_stft = l[3];
      }
      if (m.contains("resolutions")) {
        metrics.resolutions.clear();
        for (const auto& r : m.at("resolutions")) {
          metrics.resolutions.push_back({r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>()});
        }
      }
      if (m.contains("iid_frame")) m.at("iid_frame").get_to(metrics.iid_frame);
      if (m.contains("phase_gate_db")) m.at("phase_gate_db").get_to(metrics.phase_gate_db);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kInvalidConfig, std::string("bad config JSON: ") + e.what());
  }
}

RunConfig RunConfig::from_json(std::string_view json_text) {
  RunConfig cfg;
  cfg.merge_json(json_text);
  return cfg;
}

Scene load_scene(const RunConfig& cfg) {
  if (!cfg.scene_path.empty()) {
    return in_stage("scene-core", [&] {
      const auto text = read_file(cfg.scene_path);
      if (cfg.scene_path.ends_with(".json")) return scene_from_json(text, cfg.sample_rate);
      return parse_scene(text);
    });
  }
  return in_stage("segmenter", [&] {
    SegmenterConfig seg;
    seg.endpoint = cfg.segmenter;
    if (seg.endpoint == "url") {
      seg.endpoint = env_or("EARSHOT_SEGMENTER_URL", "");
      if (seg.endpoint.empty()) throw Error(Errc::kInvalidConfig, "--segmenter url needs EARSHOT_SEGMENTER_URL");
    }
    seg.api_key = env_or("EARSHOT_API_KEY", "");
    seg.timeout_seconds = cfg.service_timeout;
    seg.sample_rate = cfg.sample_rate;
    if (!cfg.defaults_table_path.empty()) seg.defaults = load_defaults_table(cfg.defaults_table_path);
    return segment_text(cfg.prose, seg);
  });
}

RenderOutcome run_render(const RunConfig& cfg, const LogSink& log) {
  auto note = [&](const std::string& msg) {
    if (log) log(msg);
  };
  in_stage("cli", [&] { cfg.validate(); });

  RenderOutcome outcome;
  auto t0 = Clock::now();
  outcome.scene = load_scene(cfg);
  const std::string scene_stage = cfg.scene_path.empty() ? "segmenter" : "scene-core";
  outcome.timings.push_back({scene_stage, seconds_since(t0)});
  note(scene_stage + ": " + std::to_string(outcome.scene.events.size()) + " event(s)");

  const int sample_rate = outcome.scene.sample_rate;
  const SourceBackend backend = in_stage("source-provider", [&] {
    std::string spec = cfg.source;
    if (spec == "service") {
      spec = "service:" + env_or("EARSHOT_TTA_URL", "");
      if (spec == "service:") throw Error(Errc::kInvalidConfig, "--source service needs EARSHOT_TTA_URL");
    }
    auto b = parse_source_backend(spec, cfg.seed);
    if (auto* svc = std::get_if<ServiceBackend>(&b)) {
      svc->api_key = env_or("EARSHOT_API_KEY", "");
      svc->timeout_seconds = cfg.service_timeout;
    }
    return b;
  });

  std::shared_ptr<const HrirSet> hrirs;
  if (cfg.spatializer.starts_with("hrir:")) {
    hrirs = in_stage("spatializer", [&] {
      auto set = std::make_shared<const HrirSet>(HrirSet::load(cfg.spatializer.substr(5)));
      if (set->sample_rate() != sample_rate) {
        throw Error(Errc::kRateMismatch, "HRIR set rate " + std::to_string(set->sample_rate()) +
                                             " differs from scene rate " + std::to_string(sample_rate));
      }
      return set;
    });
  }

  FramePlan plan;
  plan.fft_size = cfg.fft_size;
  plan.hop = cfg.hop;
  plan.frame_length = 2 * cfg.hop;
  in_stage("renderer", [&] { plan.validate(); });

  const auto& events = outcome.scene.events;
  std::vector<EventResult> results(events.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < events.size(); i = next++) {
      auto& r = results[i];
      try {
        auto t = Clock::now();
        const MonoClip mono = in_stage("source-provider", [&] { return fetch_mono(events[i], backend, sample_rate); });
        r.source_s = seconds_since(t);

        t = Clock::now();
        const std::size_t frames = plan.frame_count(mono.samples.size());
        const TransferField field = in_stage("spatializer", [&] {
          const SourcePose pose = event_pose(events[i]);
          return hrirs ? hrir_field(pose, frames, plan.fft_size, *hrirs, cfg.constants)
                       : parametric_field(pose, frames, plan.fft_size, sample_rate, cfg.constants);
        });
        r.spatial_s = seconds_since(t);

        t = Clock::now();
        r.clip = in_stage("renderer", [&] {
          RenderOptions options;
          std::ofstream dump;
          if (!cfg.dump_spectra_dir.empty()) {
            const auto path = cfg.dump_spectra_dir + "/event_" + std::to_string(i) + ".csv";
            dump.open(path);
            if (!dump) throw Error(Errc::kIo, "cannot write " + path);
            dump.precision(17);
            dump << "frame,ear,bin,re,im\n";
            options.spectra_csv = &dump;
          }
          return render_event(mono, field, plan.with_pad_for(field), options);
        });
        r.render_s = seconds_since(t);
      } catch (const StageError& e) {
        r.error = e;
      }
    }
  };

  t0 = Clock::now();
  unsigned n_workers = cfg.workers != 0 ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, std::max<std::size_t>(1, events.size())));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  const double wall = seconds_since(t0);
  double source_s = 0.0, spatial_s = 0.0, render_s = 0.0;
  for (const auto& r : results) {
    if (r.error) throw *r.error;
    source_s += r.source_s;
    spatial_s += r.spatial_s;
    render_s += r.render_s;
  }
  outcome.timings.push_back({"source-provider", source_s});
  outcome.timings.push_back({"spatializer", spatial_s});
  outcome.timings.push_back({"renderer", render_s});
  note("events: " + std::to_string(events.size()) + " rendered on " + std::to_string(n_workers) +
       " worker(s) in " + std::to_string(wall) + " s");

  t0 = Clock::now();
  Timeline timeline(sample_rate);
  in_stage("mixer", [&] {
    for (std::size_t i = 0; i < events.size(); ++i) {
      timeline.add(std::move(results[i].clip), events[i].start_time, events[i].label);
    }
    outcome.mix = mix(timeline);
  });
  outcome.timings.push_back({"mixer", seconds_since(t0)});

  json report = json::parse(mix_report_json(timeline, outcome.mix));
  report["spatializer"] = cfg.spatializer;
  report["source"] = cfg.source;
  json stages = json::array();
  for (const auto& t : outcome.timings) stages.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  report["stages"] = stages;
  outcome.report_json = report.dump(2);

  t0 = Clock::now();
  in_stage("io", [&] {
    if (!cfg.out_path.empty()) {
      write_file(cfg.out_path, encode_wav(from_binaural(outcome.mix.output),
                                          cfg.pcm16 ? WavEncoding::kPcm16 : WavEncoding::kFloat32));
    }
    if (!cfg.report_path.empty()) write_file(cfg.report_path, outcome.report_json + "\n");
  });
  outcome.timings.push_back({"io", seconds_since(t0)});
  for (const auto& t : outcome.timings) note(t.stage + ": " + std::to_string(t.seconds * 1e3) + " ms");
  return outcome;
}

}  // namespace earshot
