#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "courtmot/config.hpp"
#include "courtmot/detection.hpp"
#include "courtmot/io.hpp"
#include "courtmot/matching.hpp"
#include "courtmot/metrics.hpp"
#include "courtmot/occlusion.hpp"
#include "courtmot/reid.hpp"
#include "courtmot/simulator.hpp"
#include "courtmot/tracker.hpp"

namespace courtmot {

// Stream tags so every lane derives the same per-purpose seeds.
namespace seed_tag {
inline constexpr std::uint64_t detector = 0x646574ULL;
inline constexpr std::uint64_t camera = 0x63616dULL;
inline constexpr std::uint64_t embedding = 0x656d62ULL;
}  // namespace seed_tag

// Wall-clock stage totals across a run. Cloud generation and file IO happen
// outside the timed sections; only the processing stages count.
struct TimingReport {
  int frames = 0;
  std::int64_t total_points = 0;
  double merge_filter_ms = 0.0;
  double rasterize_ms = 0.0;
  double detect_ms = 0.0;
  double track_ms = 0.0;
  double fusion_ms = 0.0;

  double detection_tracking_ms() const {
    return merge_filter_ms + rasterize_ms + detect_ms + track_ms;
  }
  double pipeline_ms() const { return detection_tracking_ms() + fusion_ms; }
  double frames_per_second() const {
    const double ms = pipeline_ms();
    return ms > 0.0 ? frames * 1000.0 / ms : 0.0;
  }
};

std::vector<std::pair<std::string, std::string>> timing_rows(const TimingReport& t);

// Pulls per-sensor clouds one frame at a time; clouds may be empty when the
// run replays stored detections instead.
struct LidarFrameProvider {
  int frame_count = 0;
  std::vector<RigidTransform> sensor_to_world;
  std::function<std::vector<PointCloud>(int frame)> clouds;
};

struct TrackingRunResult {
  SequenceTable tracks;
  std::map<int, std::vector<BevBox>> detections;
  TimingReport timing;
};

// merge -> region filter -> rasterize -> detect -> track, one pass per frame.
TrackingRunResult run_detection_tracking(const LidarFrameProvider& provider,
                                         BevDetector& detector, const PipelineConfig& cfg);

class ReplayCameraDetections : public CameraDetectionProvider {
 public:
  void load(int camera, std::map<int, std::vector<PixelDetection>> by_frame);
  std::vector<PixelDetection> detections(int camera, int frame) const override;

 private:
  std::map<int, std::map<int, std::vector<PixelDetection>>> store_;
};

struct FusionResult {
  SequenceTable tracks;
  std::vector<OcclusionSession> sessions;
  std::vector<SearchRecord> searches;
  std::vector<RemapOutcome> outcomes;
  double fusion_ms = 0.0;
};

// Occlusion sessions -> per-id frame searches -> appearance features ->
// greedy pairing -> id remap from each session's recovery frame onward.
FusionResult run_fusion(const SequenceTable& raw_tracks,
                        const std::vector<CameraModel>& cameras,
                        const CameraDetectionProvider& detections,
                        const EmbeddingProvider& embeddings, const PipelineConfig& cfg);

struct SuiteRow {
  std::uint64_t seed = 0;
  MetricsReport lidar;
  MetricsReport fusion;
};

struct SuiteResult {
  std::vector<SuiteRow> rows;
  int rid_wins = 0;  // scenarios where fusion recovery rate >= plain tracking
  double mean_idf1_gain = 0.0;
  double elapsed_s = 0.0;
};

// Crossing-heavy scenario for one suite slot, derived from the base config.
ScenarioConfig suite_scenario(const PipelineConfig& base, std::uint64_t seed);

// Runs scenario_count seeds end to end, once camera-assisted and once without,
// and evaluates both against the simulated ground truth.
SuiteResult run_fusion_suite(const PipelineConfig& base, int scenario_count);

std::string format_suite(const SuiteResult& suite);

}  // namespace courtmot
