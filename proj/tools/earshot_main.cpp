#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "earshot/error.hpp"
#include "earshot/hrir.hpp"
#include "earshot/localization.hpp"
#include "earshot/metrics.hpp"
#include "earshot/pipeline.hpp"
#include "earshot/renderer.hpp"
#include "earshot/scene.hpp"
#include "earshot/segmenter.hpp"
#include "earshot/source_provider.hpp"
#include "earshot/wav.hpp"

namespace {

using earshot::Errc;
using earshot::Error;
using earshot::StageError;

int report_error(const StageError& e) {
  std::cerr << e.to_json() << '\n';
  return 1;
}

int report_error(const std::string& stage, const Error& e) { return report_error(StageError(stage, e)); }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write " + path);
  out << text;
}

earshot::BinauralClip load_binaural(const std::string& path) {
  return earshot::to_binaural(earshot::read_wav(path));
}

struct RenderFlags {
  std::string config_path;
  earshot::RunConfig cfg;
  bool quiet = false;
};

void add_render_flags(CLI::App& cmd, RenderFlags& f) {
  auto& c = f.cfg;
  cmd.add_option("--config", f.config_path, "JSON RunConfig; explicit flags override it");
  cmd.add_option("--scene", c.scene_path, "Scene file (@-records or JSON)");
  cmd.add_option("--prose", c.prose, "Free-form scene description");
  cmd.add_option("--segmenter", c.segmenter, "offline, url (EARSHOT_SEGMENTER_URL) or an http:// URL");
  cmd.add_option("--defaults-table", c.defaults_table_path, "Position defaults table for offline segmentation");
  cmd.add_option("--source", c.source, "corpus:<dir>, synth, service or service:<url>");
  cmd.add_option("--spatializer", c.spatializer, "parametric or hrir:<dir>");
  cmd.add_option("--out", c.out_path, "Output WAV path");
  cmd.add_option("--report", c.report_path, "Output JSON report path");
  cmd.add_option("--fft", c.fft_size, "FFT size K");
  cmd.add_option("--hop", c.hop, "Hop size; frames are 2 * hop long");
  cmd.add_option("--workers", c.workers, "Concurrent event workers (0 = hardware threads)");
  cmd.add_option("--seed", c.seed, "Seed for synthetic sources");
  cmd.add_option("--sample-rate", c.sample_rate, "Sample rate for prose scenes and sources");
  cmd.add_option("--timeout", c.service_timeout, "Service request timeout, seconds");
  cmd.add_option("--dump-spectra", c.dump_spectra_dir, "Directory for per-event spectra CSV");
  cmd.add_flag("--pcm16", c.pcm16, "Write 16-bit PCM instead of float32");
  cmd.add_flag("-q,--quiet", f.quiet, "Suppress stage logging");
}

// Config file values first, then any flag given explicitly on the command line.
earshot::RunConfig resolve_config(const CLI::App& cmd, const RenderFlags& f) {
  if (f.config_path.empty()) return f.cfg;
  earshot::RunConfig merged;
  merged.merge_json(read_text(f.config_path));
  const auto& c = f.cfg;
  auto given = [&](const char* name) { return cmd.get_option(name)->count() > 0; };
  if (given("--scene")) merged.scene_path = c.scene_path;
  if (given("--prose")) merged.prose = c.prose;
  if (given("--segmenter")) merged.segmenter = c.segmenter;
  if (given("--defaults-table")) merged.defaults_table_path = c.defaults_table_path;
  if (given("--source")) merged.source = c.source;
  if (given("--spatializer")) merged.spatializer = c.spatializer;
  if (given("--out")) merged.out_path = c.out_path;
  if (given("--report")) merged.report_path = c.report_path;
  if (given("--fft")) merged.fft_size = c.fft_size;
  if (given("--hop")) merged.hop = c.hop;
  if (given("--workers")) merged.workers = c.workers;
  if (given("--seed")) merged.seed = c.seed;
  if (given("--sample-rate")) merged.sample_rate = c.sample_rate;
  if (given("--timeout")) merged.service_timeout = c.service_timeout;
  if (given("--dump-spectra")) merged.dump_spectra_dir = c.dump_spectra_dir;
  if (given("--pcm16")) merged.pcm16 = c.pcm16;
  return merged;
}

int cmd_render(const CLI::App& cmd, const RenderFlags& flags, const std::string& save_config) {
  earshot::RunConfig cfg;
  try {
    cfg = resolve_config(cmd, flags);
  } catch (const Error& e) {
    return report_error("cli", e);
  }
  try {
    if (!save_config.empty()) write_text(save_config, cfg.to_json() + "\n");
    earshot::LogSink log;
    if (!flags.quiet) log = [](std::string_view msg) { std::cerr << "[earshot] " << msg << '\n'; };
    const auto outcome = earshot::run_render(cfg, log);
    if (cfg.report_path.empty()) std::cout << outcome.report_json << '\n';
  } catch (const StageError& e) {
    return report_error(e);
  } catch (const Error& e) {
    return report_error("cli", e);
  }
  return 0;
}

int cmd_parse(const CLI::App& cmd, const RenderFlags& flags, bool as_json) {
  try {
    const auto cfg = resolve_config(cmd, flags);
    if (cfg.scene_path.empty() && cfg.prose.empty()) {
      throw Error(Errc::kInvalidConfig, "either --scene or --prose is required");
    }
    const auto scene = earshot::load_scene(cfg);
    std::cout << (as_json ? earshot::scene_to_json(scene) + "\n" : earshot::serialize_scene(scene));
  } catch (const StageError& e) {
    return report_error(e);
  } catch (const Error& e) {
    return report_error("cli", e);
  }
  return 0;
}

int cmd_eval(const std::vector<std::string>& preds, const std::vector<std::string>& refs, bool trim,
             const std::string& csv_path) {
  if (preds.size() != refs.size()) {
    return report_error("cli", Error(Errc::kInvalidConfig, "--pred and --ref must be given the same number of times"));
  }
  try {
    nlohmann::json reports = nlohmann::json::array();
    std::ostringstream csv;
    csv << "pred,ref," << earshot::MetricReport::csv_header() << '\n';
    for (std::size_t i = 0; i < preds.size(); ++i) {
      auto pred = load_binaural(preds[i]);
      auto ref = load_binaural(refs[i]);
      if (trim) {
        const auto n = std::min(pred.left.size(), ref.left.size());
        pred.left.resize(n);
        pred.right.resize(n);
        ref.left.resize(n);
        ref.right.resize(n);
      }
      const auto report = earshot::eval_pair(pred, ref);
      auto j = nlohmann::json::parse(report.to_json());
      j["pred"] = preds[i];
      j["ref"] = refs[i];
      reports.push_back(std::move(j));
      csv << preds[i] << ',' << refs[i] << ',' << report.csv_row() << '\n';
    }
    std::cout << (reports.size() == 1 ? reports[0] : reports).dump(2) << '\n';
    if (!csv_path.empty()) write_text(csv_path, csv.str());
  } catch (const Error& e) {
    return report_error("metrics", e);
  }
  return 0;
}

int cmd_localize(const std::vector<std::string>& clips, const std::string& templates_spec) {
  try {
    std::optional<earshot::HrirSet> templates;
    if (templates_spec == "synthetic") {
      templates = earshot::make_synthetic_hrir_set();
    } else if (!templates_spec.empty()) {
      templates = earshot::HrirSet::load(templates_spec);
    }
    nlohmann::json out = nlohmann::json::array();
    for (const auto& path : clips) {
      const auto est = earshot::estimate_direction(load_binaural(path), templates ? &*templates : nullptr);
      auto j = nlohmann::json::parse(est.to_json());
      j["clip"] = path;
      out.push_back(std::move(j));
    }
    std::cout << (out.size() == 1 ? out[0] : out).dump(2) << '\n';
  } catch (const Error& e) {
    return report_error("metrics", e);
  }
  return 0;
}

int cmd_selftest(std::size_t fft, std::size_t hop, std::uint64_t seed) {
  try {
    earshot::FramePlan plan;
    plan.fft_size = fft;
    plan.hop = hop;
    plan.frame_length = 2 * hop;
    const auto clip = earshot::synth_test_signal(earshot::SignalKind::kNoise, 1.0, earshot::kDefaultSampleRate, seed);
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = earshot::wola_roundtrip(clip, plan);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double max_err = 0.0;
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
      max_err = std::max(max_err, std::abs(out.samples[i] - clip.samples[i]));
    }
    const bool pass = max_err < 1e-6;
    std::cout << nlohmann::json{{"max_abs_error", max_err}, {"seconds", seconds}, {"pass", pass}}.dump(2) << '\n';
    return pass ? 0 : 1;
  } catch (const Error& e) {
    return report_error("renderer", e);
  }
}

int cmd_make_hrir(const std::string& out_dir, int sample_rate, double step, std::size_t length) {
  try {
    earshot::SyntheticHrirOptions options;
    options.sample_rate = sample_rate;
    options.azimuth_step = step;
    options.length = length;
    std::filesystem::create_directories(out_dir);
    earshot::make_synthetic_hrir_set(options).save(out_dir);
  } catch (const Error& e) {
    return report_error("spatializer", e);
  } catch (const std::filesystem::filesystem_error& e) {
    return report_error("spatializer", Error(Errc::kIo, e.what()));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"earshot: text-described scenes to binaural audio"};
  app.require_subcommand(1);

  RenderFlags render_flags;
  std::string save_config;
  auto* render = app.add_subcommand("render", "Render a scene to a binaural WAV");
  add_render_flags(*render, render_flags);
  render->add_option("--save-config", save_config, "Write the resolved RunConfig as JSON");

  RenderFlags parse_flags;
  bool parse_json = false;
  auto* parse = app.add_subcommand("parse", "Print the scene records for a scene file or prose");
  add_render_flags(*parse, parse_flags);
  parse->add_flag("--json", parse_json, "Print JSON instead of @-records");

  std::vector<std::string> preds, refs;
  bool trim = false;
  std::string csv_path;
  auto* eval = app.add_subcommand("eval", "Compare rendered WAVs against references");
  eval->add_option("--pred", preds, "Predicted stereo WAV (repeatable)")->required();
  eval->add_option("--ref", refs, "Reference stereo WAV (repeatable)")->required();
  eval->add_flag("--trim", trim, "Trim each pair to the shorter length");
  eval->add_option("--csv", csv_path, "Also write one CSV row per pair");

  std::vector<std::string> clips;
  std::string templates;
  auto* localize = app.add_subcommand("localize", "Estimate source direction of stereo WAVs");
  localize->add_option("clips", clips, "Stereo WAV files")->required();
  localize->add_option("--templates", templates, "HRIR directory or 'synthetic' for front/rear and elevation");

  std::size_t st_fft = 2048, st_hop = 512;
  std::uint64_t st_seed = 0;
  auto* selftest = app.add_subcommand("roundtrip-selftest", "Identity analysis/synthesis check on white noise");
  selftest->add_option("--fft", st_fft, "FFT size K");
  selftest->add_option("--hop", st_hop, "Hop size");
  selftest->add_option("--seed", st_seed, "Noise seed");

  std::string hrir_out;
  int hrir_rate = earshot::kDefaultSampleRate;
  double hrir_step = 15.0;
  std::size_t hrir_length = 256;
  auto* make_hrir = app.add_subcommand("make-hrir", "Write the built-in synthetic HRIR set to a directory");
  make_hrir->add_option("--out", hrir_out, "Output directory")->required();
  make_hrir->add_option("--sample-rate", hrir_rate, "Sample rate");
  make_hrir->add_option("--step", hrir_step, "Azimuth step, degrees");
  make_hrir->add_option("--length", hrir_length, "Response length, samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("cli", Error(Errc::kInvalidConfig, e.what()));
  }

  if (render->parsed()) return cmd_render(*render, render_flags, save_config);
  if (parse->parsed()) return cmd_parse(*parse, parse_flags, parse_json);
  if (eval->parsed()) return cmd_eval(preds, refs, trim, csv_path);
  if (localize->parsed()) return cmd_localize(clips, templates);
  if (selftest->parsed()) return cmd_selftest(st_fft, st_hop, st_seed);
  if (make_hrir->parsed()) return cmd_make_hrir(hrir_out, hrir_rate, hrir_step, hrir_length);
  return 1;
}
