#include "courtmot/pipeline.hpp"

#include <algorithm>
#include <chrono>

namespace courtmot {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<int> concat_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> timing_rows(const TimingReport& t) {
  const double n = t.frames > 0 ? static_cast<double>(t.frames) : 1.0;
  return {
      {"frames", std::to_string(t.frames)},
      {"total_points", std::to_string(t.total_points)},
      {"detection_tracking_ms_per_frame", fmt_double(t.detection_tracking_ms() / n, 3)},
      {"fusion_reid_ms_per_frame", fmt_double(t.fusion_ms / n, 3)},
      {"total_ms_per_frame", fmt_double(t.pipeline_ms() / n, 3)},
      {"frames_per_second", fmt_double(t.frames_per_second(), 3)},
      {"merge_filter_ms", fmt_double(t.merge_filter_ms, 3)},
      {"rasterize_ms", fmt_double(t.rasterize_ms, 3)},
      {"detect_ms", fmt_double(t.detect_ms, 3)},
      {"track_ms", fmt_double(t.track_ms, 3)},
      {"fusion_ms", fmt_double(t.fusion_ms, 3)},
  };
}

TrackingRunResult run_detection_tracking(const LidarFrameProvider& provider,
                                         BevDetector& detector, const PipelineConfig& cfg) {
  if (provider.frame_count < 1) throw DataError("run: no frames to process");
  const CourtRegion region = court_region(cfg);
  Tracker tracker(cfg.tracker);

  TrackingRunResult result;
  result.timing.frames = provider.frame_count;

  for (int t = 1; t <= provider.frame_count; ++t) {
    std::vector<PointCloud> raw;
    if (provider.clouds) raw = provider.clouds(t);

    BevImage bev;
    bool have_bev = false;
    if (!raw.empty()) {
      for (const auto& c : raw) result.timing.total_points += c.points.size();
      auto t0 = Clock::now();
      const PointCloud merged = merge_clouds(raw, provider.sensor_to_world);
      const PointCloud filtered = filter_region(merged, region);
      result.timing.merge_filter_ms += ms_since(t0);

      t0 = Clock::now();
      bev = rasterize_bev(filtered, cfg.grid);
      have_bev = true;
      result.timing.rasterize_ms += ms_since(t0);
    }

    auto t0 = Clock::now();
    DetectionSet ds = detector.detect(t, have_bev ? &bev : nullptr);
    if (cfg.suppress_iou > 0.0) ds.boxes = suppress_duplicates(ds.boxes, cfg.suppress_iou);
    result.timing.detect_ms += ms_since(t0);

    t0 = Clock::now();
    std::vector<Measurement> measurements;
    measurements.reserve(ds.boxes.size());
    for (const auto& b : ds.boxes)
      measurements.push_back(Measurement{plane_box_from_bev(b, cfg.grid), b.confidence});
    const auto active = tracker.step(t, measurements);
    result.timing.track_ms += ms_since(t0);

    result.detections[t] = ds.boxes;
    result.tracks.ensure_frame(t);
    for (const auto& tr : active)
      result.tracks.frame(t).push_back(TrackedBox{tr.id, tr.box()});
  }
  return result;
}

void ReplayCameraDetections::load(int camera, std::map<int, std::vector<PixelDetection>> by_frame) {
  store_[camera] = std::move(by_frame);
}

std::vector<PixelDetection> ReplayCameraDetections::detections(int camera, int frame) const {
  const auto cam = store_.find(camera);
  if (cam == store_.end()) return {};
  const auto fr = cam->second.find(frame);
  return fr == cam->second.end() ? std::vector<PixelDetection>{} : fr->second;
}

FusionResult run_fusion(const SequenceTable& raw_tracks,
                        const std::vector<CameraModel>& cameras,
                        const CameraDetectionProvider& detections,
                        const EmbeddingProvider& embeddings, const PipelineConfig& cfg) {
  const auto t0 = Clock::now();
  FusionResult out;
  out.tracks = raw_tracks;
  out.sessions = extract_sessions(raw_tracks, cfg.neighbor_radius);

  const int total_frames = raw_tracks.frame_count();
  std::vector<IdRemap> remaps;
  std::vector<RemapOutcome> skipped;

  for (const auto& s : out.sessions) {
    if (s.open) {
      skipped.push_back(
          RemapOutcome{s.index, false, {}, "session still open at the last frame"});
      continue;
    }

    SessionFeatures features;
    auto gather = [&](const std::vector<int>& ids, int anchor_frame, SearchDirection dir,
                      std::map<int, EmbeddingVector>& into) {
      for (const int id : ids) {
        SearchContext ctx;
        ctx.tracks = &raw_tracks;
        const TrackedBox* anchor = raw_tracks.find(anchor_frame, id);
        ctx.target_fallback = anchor ? anchor->box : PlaneBox{};
        ctx.cameras = &cameras;
        ctx.detections = &detections;
        ctx.t_min = 1;
        ctx.t_max = total_frames;
        const auto ref = frame_search(id, anchor_frame, dir, cfg.search, ctx);

        SearchRecord rec;
        rec.session_index = s.index;
        rec.target_id = id;
        rec.direction = dir;
        rec.found = ref.has_value();
        if (ref) rec.ref = *ref;
        out.searches.push_back(rec);

        if (!ref) continue;
        const auto e = embeddings.embed(id, *ref);
        if (e) into.emplace(id, *e);
      }
    };
    gather(concat_sorted(s.lost_ids, s.neighbor_lost_ids), s.t_start - 1,
           SearchDirection::Backward, features.pre);
    gather(concat_sorted(s.gain_ids, s.neighbor_gain_ids), s.t_end, SearchDirection::Forward,
           features.post);

    IdRemap remap = resolve_session(s, features, cfg.reid_min_cosine);
    if (remap.post_to_pre.empty())
      skipped.push_back(RemapOutcome{s.index, false, {}, "no accepted appearance pairs"});
    else
      remaps.push_back(remap);
  }

  out.outcomes = apply_remap(out.tracks, remaps);
  out.outcomes.insert(out.outcomes.end(), skipped.begin(), skipped.end());
  std::sort(out.outcomes.begin(), out.outcomes.end(),
            [](const RemapOutcome& a, const RemapOutcome& b) {
              return a.session_index < b.session_index;
            });
  out.fusion_ms = ms_since(t0);
  return out;
}

ScenarioConfig suite_scenario(const PipelineConfig& base, std::uint64_t seed) {
  ScenarioConfig sc = base.scenario;
  sc.seed = seed;
  sc.player_count = std::max(8, sc.player_count);
  sc.duration_s = std::max(12.0, sc.duration_s);
  if (sc.crossings.empty()) {
    // Two to four crossings between disjoint pairs, spread over the run.
    Rng rng(mix_seed(seed, 0x7375697465ULL));
    const int count = rng.uniform_int(2, 4);
    std::vector<int> ids(sc.player_count);
    for (int i = 0; i < sc.player_count; ++i) ids[i] = i + 1;
    for (int i = sc.player_count - 1; i > 0; --i)
      std::swap(ids[i], ids[rng.uniform_int(0, i)]);
    for (int k = 0; k < count; ++k)
      sc.crossings.push_back(CrossingEvent{3.0 + 2.0 * k, ids[2 * k], ids[2 * k + 1]});
  }
  return sc;
}

SuiteResult run_fusion_suite(const PipelineConfig& base, int scenario_count) {
  if (scenario_count < 1) throw ConfigError("suite: scenario_count must be positive");
  const auto start = Clock::now();

  PipelineConfig cfg = base;
  if (cfg.detector.merge_distance <= 0.0)
    cfg.detector.merge_distance = 2.0 * cfg.scenario.body_radius + 0.1;

  SuiteResult out;
  double gain_sum = 0.0;
  for (int i = 0; i < scenario_count; ++i) {
    const std::uint64_t seed = base.scenario.seed + static_cast<std::uint64_t>(i);
    cfg.scenario = suite_scenario(base, seed);
    const Scenario sc = generate_scenario(cfg.scenario);

    LidarFrameProvider provider;
    provider.frame_count = sc.frame_count;

    OracleBevDetector detector(sc.gt, cfg.grid, cfg.detector,
                               mix_seed(seed, seed_tag::detector));
    const auto run = run_detection_tracking(provider, detector, cfg);

    const CameraGtTable cam_gt = render_all_cameras(sc);
    std::vector<CameraModel> cameras;
    std::vector<std::pair<int, int>> sizes;
    for (const auto& rig : sc.rigs) {
      cameras.push_back(rig.camera);
      sizes.emplace_back(rig.camera.width, rig.camera.height);
    }
    SyntheticCameraDetections cam_dets(cam_gt, sizes, cfg.camera_detector,
                                       mix_seed(seed, seed_tag::camera));
    SyntheticEmbeddings embeds(cam_gt, cfg.embedding, mix_seed(seed, seed_tag::embedding));
    const auto fusion = run_fusion(run.tracks, cameras, cam_dets, embeds, cfg);

    SuiteRow row;
    row.seed = seed;
    row.lidar = evaluate_sequence(sc.gt, run.tracks, cfg.metrics);
    row.fusion = evaluate_sequence(sc.gt, fusion.tracks, cfg.metrics);
    if (row.fusion.r_id >= row.lidar.r_id) ++out.rid_wins;
    gain_sum += row.fusion.idf1 - row.lidar.idf1;
    out.rows.push_back(row);
  }
  out.mean_idf1_gain = gain_sum / scenario_count;
  out.elapsed_s = ms_since(start) / 1000.0;
  return out;
}

std::string format_suite(const SuiteResult& suite) {
  std::string s;
  for (const auto& row : suite.rows) {
    s += "seed=" + std::to_string(row.seed);
    s += " plain_idf1=" + fmt_double(row.lidar.idf1, 6);
    s += " fusion_idf1=" + fmt_double(row.fusion.idf1, 6);
    s += " plain_rid=" + fmt_double(row.lidar.r_id, 6);
    s += " fusion_rid=" + fmt_double(row.fusion.r_id, 6);
    s += " plain_hota=" + fmt_double(row.lidar.hota, 6);
    s += " fusion_hota=" + fmt_double(row.fusion.hota, 6);
    s += "\n";
  }
  s += "scenarios=" + std::to_string(suite.rows.size()) + "\n";
  s += "recovery_wins=" + std::to_string(suite.rid_wins) + "\n";
  s += "mean_idf1_gain=" + fmt_double(suite.mean_idf1_gain, 6) + "\n";
  return s;
}

}  // namespace courtmot
