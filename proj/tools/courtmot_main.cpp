#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "courtmot/config.hpp"
#include "courtmot/io.hpp"
#include "courtmot/pipeline.hpp"

namespace fs = std::filesystem;
using namespace courtmot;

namespace {

struct CommonOpts {
  std::vector<std::string> configs;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.configs, "Config file; later files override earlier ones")
      ->check(CLI::ExistingFile);
  sub->add_option("--set", o.sets, "Override one key, key=value");
}

PipelineConfig load_config(const CommonOpts& o) {
  ConfigMap map;
  for (const auto& f : o.configs) merge_config(map, read_config_file(f));
  for (const auto& s : o.sets) apply_override(map, s);
  return pipeline_config_from(map);
}

std::string cloud_path(const std::string& dir, int frame, int rig) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "/clouds/frame_%06d_rig%d.txt", frame, rig);
  return dir + buf;
}

std::string camera_file(const std::string& dir, int camera, const std::string& kind) {
  return dir + "/camera" + std::to_string(camera) + "_" + kind + ".txt";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << text;
}

// Output directories fall back to COURTMOT_OUT when the flag is omitted.
std::string resolve_dir(std::string value, const char* flag) {
  if (value.empty())
    if (const char* env = std::getenv("COURTMOT_OUT")) value = env;
  if (value.empty())
    throw ConfigError(std::string(flag) + " is required (or set COURTMOT_OUT)");
  return value;
}

void cmd_simulate(const CommonOpts& opts, const std::string& dir, bool with_clouds) {
  const PipelineConfig cfg = load_config(opts);
  const Scenario sc = generate_scenario(cfg.scenario);

  fs::create_directories(dir);
  write_tracks(dir + "/gt.txt", sc.gt);
  write_calibration(dir + "/calib.conf", sc.rigs);
  write_text(dir + "/scenario.conf", serialize_config(config_to_map(cfg)));

  const CameraGtTable cam_gt = render_all_cameras(sc);
  std::vector<std::pair<int, int>> sizes;
  for (const auto& rig : sc.rigs) sizes.emplace_back(rig.camera.width, rig.camera.height);
  SyntheticCameraDetections provider(cam_gt, sizes, cfg.camera_detector,
                                     mix_seed(cfg.scenario.seed, seed_tag::camera));
  for (size_t c = 0; c < sc.rigs.size(); ++c) {
    write_camera_gt(camera_file(dir, static_cast<int>(c), "gt"), cam_gt.data[c]);
    std::map<int, std::vector<PixelDetection>> dets;
    for (int t = 1; t <= sc.frame_count; ++t)
      dets[t] = provider.detections(static_cast<int>(c), t);
    write_camera_detections(camera_file(dir, static_cast<int>(c), "dets"), dets);
  }

  if (with_clouds) {
    fs::create_directories(dir + "/clouds");
    for (int t = 1; t <= sc.frame_count; ++t)
      for (size_t r = 0; r < sc.rigs.size(); ++r)
        write_cloud(cloud_path(dir, t, static_cast<int>(r)),
                    sample_lidar(sc, static_cast<int>(r), t));
  }
}

struct TrackInputs {
  PipelineConfig cfg;
  std::vector<Rig> rigs;
  int frame_count = 0;
  TrackingRunResult run;
};

TrackInputs run_track(const CommonOpts& opts, const std::string& data,
                      const std::string& replay) {
  TrackInputs in;
  in.cfg = load_config(opts);
  in.rigs = read_calibration(data + "/calib.conf");

  std::unique_ptr<BevDetector> detector;
  SequenceTable gt;
  if (replay.empty()) {
    gt = read_tracks(data + "/gt.txt");
    in.frame_count = gt.frame_count();
    detector = std::make_unique<OracleBevDetector>(
        gt, in.cfg.grid, in.cfg.detector, mix_seed(in.cfg.scenario.seed, seed_tag::detector));
  } else {
    auto by_frame = read_plane_detections(replay, in.cfg.grid);
    if (by_frame.empty()) throw DataError(replay + ": no detections to replay");
    in.frame_count = by_frame.rbegin()->first;
    detector = std::make_unique<ReplayBevDetector>(std::move(by_frame));
  }

  LidarFrameProvider provider;
  provider.frame_count = in.frame_count;
  for (const auto& rig : in.rigs) provider.sensor_to_world.push_back(rig.lidar_to_world);
  if (fs::is_directory(data + "/clouds")) {
    const int rig_count = static_cast<int>(in.rigs.size());
    provider.clouds = [data, rig_count](int t) {
      std::vector<PointCloud> clouds;
      for (int r = 0; r < rig_count; ++r) clouds.push_back(read_cloud(cloud_path(data, t, r)));
      return clouds;
    };
  }

  in.run = run_detection_tracking(provider, *detector, in.cfg);
  return in;
}

void write_track_outputs(const std::string& out_dir, const TrackInputs& in) {
  fs::create_directories(out_dir);
  write_tracks(out_dir + "/tracks.txt", in.run.tracks);
  write_plane_detections(out_dir + "/detections.txt", in.run.detections, in.cfg.grid);
  write_keyvalues(out_dir + "/timing.txt", timing_rows(in.run.timing));
  write_text(out_dir + "/run.conf", serialize_config(config_to_map(in.cfg)));
}

void cmd_track(const CommonOpts& opts, const std::string& data, const std::string& out_dir,
               const std::string& replay) {
  const TrackInputs in = run_track(opts, data, replay);
  write_track_outputs(out_dir, in);
}

void cmd_track_fusion(const CommonOpts& opts, const std::string& data,
                      const std::string& out_dir, const std::string& replay) {
  TrackInputs in = run_track(opts, data, replay);

  std::vector<CameraModel> cameras;
  for (const auto& rig : in.rigs) cameras.push_back(rig.camera);
  ReplayCameraDetections cam_dets;
  CameraGtTable cam_gt;
  cam_gt.data.resize(in.rigs.size());
  for (size_t c = 0; c < in.rigs.size(); ++c) {
    const int ci = static_cast<int>(c);
    cam_dets.load(ci, read_camera_detections(camera_file(data, ci, "dets")));
    cam_gt.data[c] = read_camera_gt(camera_file(data, ci, "gt"));
    if (cam_gt.data[c].size() < static_cast<size_t>(in.frame_count))
      cam_gt.data[c].resize(in.frame_count);
  }
  SyntheticEmbeddings embeds(cam_gt, in.cfg.embedding,
                             mix_seed(in.cfg.scenario.seed, seed_tag::embedding));

  const FusionResult fusion = run_fusion(in.run.tracks, cameras, cam_dets, embeds, in.cfg);

  fs::create_directories(out_dir);
  write_tracks(out_dir + "/tracks_plain.txt", in.run.tracks);
  write_tracks(out_dir + "/tracks.txt", fusion.tracks);
  write_plane_detections(out_dir + "/detections.txt", in.run.detections, in.cfg.grid);
  write_sessions(out_dir + "/sessions.txt", fusion.sessions);
  write_search_records(out_dir + "/searches.txt", fusion.searches);
  write_remap_outcomes(out_dir + "/remaps.txt", fusion.outcomes);
  in.run.timing.fusion_ms = fusion.fusion_ms;
  write_keyvalues(out_dir + "/timing.txt", timing_rows(in.run.timing));
  write_text(out_dir + "/run.conf", serialize_config(config_to_map(in.cfg)));
}

void cmd_evaluate(const CommonOpts& opts, const std::string& gt_path,
                  const std::string& tracks_path, const std::string& out_path) {
  const PipelineConfig cfg = load_config(opts);
  const SequenceTable gt = read_tracks(gt_path);
  const SequenceTable pred = read_tracks(tracks_path);
  if (pred.frame_count() > gt.frame_count())
    throw DataError("frame ranges misaligned: tracks reach frame " +
                    std::to_string(pred.frame_count()) + ", ground truth ends at " +
                    std::to_string(gt.frame_count()));
  const MetricsReport report = evaluate_sequence(gt, pred, cfg.metrics);
  const std::string text = format_metrics(report);
  std::cout << text;
  if (!out_path.empty()) write_text(out_path, text);
}

void cmd_report(const CommonOpts& opts, int scenarios, const std::string& out_path) {
  const PipelineConfig cfg = load_config(opts);
  const SuiteResult suite = run_fusion_suite(cfg, scenarios);
  const std::string text = format_suite(suite);
  std::cout << text;
  std::cerr << "elapsed_s=" << fmt_double(suite.elapsed_s, 3) << "\n";
  if (!out_path.empty()) write_text(out_path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Court tracking toolkit: simulation, tracking, fusion and evaluation"};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  std::string sim_dir;
  bool sim_clouds = false;
  auto* sim = app.add_subcommand("simulate", "Generate a scenario dataset");
  sim->add_option("--data", sim_dir, "Output dataset directory (or COURTMOT_OUT)");
  sim->add_flag("--clouds", sim_clouds, "Also write per-sensor point clouds");
  add_common(sim, sim_opts);

  CommonOpts track_opts;
  std::string track_data, track_out, track_replay;
  auto* track = app.add_subcommand("track", "Run detection and tracking");
  track->add_option("--data", track_data, "Dataset directory")->required();
  track->add_option("--out", track_out, "Output directory (or COURTMOT_OUT)");
  track->add_option("--replay", track_replay, "Replay detections from this file")
      ->check(CLI::ExistingFile);
  add_common(track, track_opts);

  CommonOpts fusion_opts;
  std::string fusion_data, fusion_out, fusion_replay;
  auto* fusionc = app.add_subcommand("track-fusion", "Tracking plus camera-assisted id repair");
  fusionc->add_option("--data", fusion_data, "Dataset directory")->required();
  fusionc->add_option("--out", fusion_out, "Output directory (or COURTMOT_OUT)");
  fusionc->add_option("--replay", fusion_replay, "Replay detections from this file")
      ->check(CLI::ExistingFile);
  add_common(fusionc, fusion_opts);

  CommonOpts eval_opts;
  std::string eval_gt, eval_tracks, eval_out;
  auto* eval = app.add_subcommand("evaluate", "Score tracks against ground truth");
  eval->add_option("--gt", eval_gt, "Ground-truth track file")->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--tracks", eval_tracks, "Predicted track file")->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "Also write the metrics to this file");
  add_common(eval, eval_opts);

  CommonOpts report_opts;
  int report_scenarios = 20;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Multi-scenario fusion comparison");
  report->add_option("--scenarios", report_scenarios, "Number of seeds to run");
  report->add_option("--out", report_out, "Also write the report to this file");
  add_common(report, report_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) cmd_simulate(sim_opts, resolve_dir(sim_dir, "--data"), sim_clouds);
    if (track->parsed())
      cmd_track(track_opts, track_data, resolve_dir(track_out, "--out"), track_replay);
    if (fusionc->parsed())
      cmd_track_fusion(fusion_opts, fusion_data, resolve_dir(fusion_out, "--out"),
                       fusion_replay);
    if (eval->parsed()) cmd_evaluate(eval_opts, eval_gt, eval_tracks, eval_out);
    if (report->parsed()) cmd_report(report_opts, report_scenarios, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
