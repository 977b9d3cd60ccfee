#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "earshot/error.hpp"
#include "earshot/metrics.hpp"
#include "earshot/mixer.hpp"
#include "earshot/scene.hpp"
#include "earshot/transfer_field.hpp"

namespace earshot {

/// Everything needed to reproduce a render. Round-trips through JSON.
struct RunConfig {
  std::string scene_path;   // scene file; takes precedence over prose
  std::string prose;
  std::string segmenter = "offline";         // "offline" or http URL
  std::string source = "synth";              // corpus:<dir> | synth | service:<url>
  std::string spatializer = "parametric";    // parametric | hrir:<dir>
  std::string out_path;
  std::string report_path;
  std::string defaults_table_path;           // empty: built-in table
  std::string dump_spectra_dir;              // empty: no dump
  std::size_t fft_size = 2048;
  std::size_t hop = 512;                     // frame length is 2 * hop
  unsigned workers = 0;                      // 0: hardware concurrency
  std::uint64_t seed = 0;
  bool pcm16 = false;
  int sample_rate = kDefaultSampleRate;
  double service_timeout = 60.0;
  SpatialConstants constants;
  MetricConfig metrics;

  /// Throws Error(kInvalidConfig).
  void validate() const;
  std::string to_json(int indent = 2) const;
  /// Fields absent from the JSON keep their current values. Throws Error(kInvalidConfig).
  void merge_json(std::string_view json_text);
  static RunConfig from_json(std::string_view json_text);
};

/// An Error annotated with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause);
  const std::string& stage() const noexcept { return stage_; }
  std::string to_json() const;

 private:
  std::string stage_;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RenderOutcome {
  Scene scene;
  MixResult mix;
  std::string report_json;
  std::vector<StageTiming> timings;
};

using LogSink = std::function<void(std::string_view)>;

/// Scene from cfg.scene_path or cfg.prose (segmenter), per-event source fetch,
/// spatialization and rendering on up to cfg.workers threads, then the mix. Writes the
/// WAV and JSON report when the paths are set. Per-event failures are reported for the
/// lowest failing event index, so errors are deterministic.
/// Throws StageError.
RenderOutcome run_render(const RunConfig& cfg, const LogSink& log = {});

/// Scene stage alone: parse the scene file or segment the prose.
Scene load_scene(const RunConfig& cfg);

}  // namespace earshot
