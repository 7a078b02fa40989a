#pragma once

#include <cstdint>
#include <vector>

#include "courtmot/common.hpp"
#include "courtmot/geometry.hpp"
#include "courtmot/matching.hpp"
#include "courtmot/reid.hpp"

namespace courtmot {

struct LidarSpec {
  double az_fov_deg = 125.0;
  double el_fov_deg = 25.0;
  double az_res_deg = 0.18;
  double el_res_deg = 0.23;
  double max_range = 150.0;
  double noise_sigma = 0.02;
};

struct CameraSpec {
  int width = 3840;
  int height = 2160;
  double hfov_deg = 95.0;
  double vfov_deg = 78.0;
};

struct CrossingEvent {
  double time_s = 0.0;
  int a = 0;  // player ids, 1-based
  int b = 0;
};

struct MotionConfig {
  double max_speed = 3.5;
  double steer_gain = 2.5;
  double repulsion_radius = 1.0;
  double repulsion_gain = 3.0;
  double waypoint_tolerance = 0.5;
  double crossing_window_s = 0.7;
  double crossing_prep_s = 2.0;
};

struct ScenarioConfig {
  int player_count = 10;
  double duration_s = 10.0;
  double frame_rate = 10.0;
  double court_width = 28.0;
  double court_height = 15.0;
  double body_radius = 0.30;
  double body_height = 1.90;
  MotionConfig motion;
  LidarSpec lidar;
  CameraSpec camera;
  std::vector<CrossingEvent> crossings;
  std::uint64_t seed = 1;
};

struct Rig {
  RigidTransform lidar_to_world;
  CameraModel camera;
};

struct Scenario {
  ScenarioConfig config;
  SequenceTable gt;  // player footprints per frame, ids 1..player_count
  std::vector<Rig> rigs;
  int frame_count = 0;

  double frame_time(int frame) const { return (frame - 1) / config.frame_rate; }
};

// Two sideline units at mid-court plus one baseline-corner unit, 2 m up,
// aimed at court center.
std::vector<Rig> default_rigs(const ScenarioConfig& cfg);

// Deterministic waypoint-seeking motion with pairwise repulsion and scripted
// crossings that force the pair through a shared point, leaving along
// swapped directions.
Scenario generate_scenario(const ScenarioConfig& cfg);

// Ray casting over the angular grid; nearest cylinder/floor hit per ray with
// Gaussian range noise. Points are in the sensor frame.
PointCloud sample_lidar(const Scenario& scenario, int rig_index, int frame);

struct CameraGtBox {
  int id = 0;
  Rect box;  // clamped to the image
  double visibility = 1.0;
};

// Projected player boxes with the fraction not covered by nearer players.
std::vector<CameraGtBox> render_camera_gt(const Scenario& scenario, int camera_index,
                                          int frame);

// [camera][frame-1] -> boxes. Precomputed once per scenario.
struct CameraGtTable {
  std::vector<std::vector<std::vector<CameraGtBox>>> data;

  const std::vector<CameraGtBox>& at(int camera, int frame) const {
    return data.at(camera).at(frame - 1);
  }
};

CameraGtTable render_all_cameras(const Scenario& scenario);

// Fraction of target covered by the union of the covers.
double covered_fraction(const Rect& target, const std::vector<Rect>& covers);

// Per-identity unit anchor; orthogonal mode uses basis vectors.
std::vector<double> embedding_anchor(int dim, int identity, bool orthogonal,
                                     std::uint64_t seed);

// anchor + isotropic noise of total magnitude ~sigma, renormalized.
std::vector<double> synth_embedding(const std::vector<double>& anchor, double sigma, Rng& rng);

struct CameraNoiseModel {
  double sigma_px = 2.0;
  double miss_rate = 0.02;
  double fp_rate = 0.1;
  double merge_iou = 0.45;
  double merged_confidence = 0.4;
  double clean_confidence = 0.9;
};

// Image-plane analog of the BEV oracle: overlapping GT boxes merge, clean
// ones jitter and occasionally drop, false positives appear anywhere.
class SyntheticCameraDetections : public CameraDetectionProvider {
 public:
  SyntheticCameraDetections(const CameraGtTable& gt, std::vector<std::pair<int, int>> sizes,
                            CameraNoiseModel noise, std::uint64_t seed);
  std::vector<PixelDetection> detections(int camera, int frame) const override;

 private:
  const CameraGtTable& gt_;
  std::vector<std::pair<int, int>> image_sizes_;  // (width, height) per camera
  CameraNoiseModel noise_;
  std::uint64_t seed_;
};

struct EmbeddingModel {
  int dim = 128;
  double base_sigma = 0.05;
  double occlusion_noise_scale = 4.0;
  bool orthogonal_anchors = true;
};

// Resolves the GT identity behind the matched patch (best-IoU GT box on that
// camera/frame) and returns its anchor with visibility-scaled noise.
class SyntheticEmbeddings : public EmbeddingProvider {
 public:
  SyntheticEmbeddings(const CameraGtTable& gt, EmbeddingModel model, std::uint64_t seed);
  std::optional<EmbeddingVector> embed(int track_id, const FrameRef& ref) const override;

 private:
  const CameraGtTable& gt_;
  EmbeddingModel model_;
  std::uint64_t seed_;
};

}  // namespace courtmot
