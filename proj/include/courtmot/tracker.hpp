#pragma once

#include <Eigen/Dense>
#include <vector>

#include "courtmot/common.hpp"

namespace courtmot {

enum class TrackStatus { Tentative, Active, Lost };

// Mean order: (cx, cy, w, h, vx, vy). The motion model is constant-velocity
// on the center; extents follow measurements by exponential smoothing.
struct TrackState {
  int id = 0;
  Eigen::Matrix<double, 6, 1> mean = Eigen::Matrix<double, 6, 1>::Zero();
  Eigen::Matrix<double, 6, 6> covariance = Eigen::Matrix<double, 6, 6>::Identity();
  TrackStatus status = TrackStatus::Tentative;
  int hits = 0;
  int frames_since_update = 0;

  PlaneBox box() const { return PlaneBox{mean(0), mean(1), mean(2), mean(3)}; }
};

struct TrackerConfig {
  double high_conf_threshold = 0.6;
  double low_conf_threshold = 0.1;
  double match_threshold_stage1 = 0.8;  // max allowed cost (1 - IoU)
  double match_threshold_stage2 = 0.5;
  int max_lost_frames = 30;
  int min_hits_to_activate = 3;
  double size_smoothing = 0.3;        // weight of the new measurement
  double pos_noise_weight = 0.05;     // process/measurement sigmas, scaled by box height
  double vel_noise_weight = 0.00625;
  double meas_noise_weight = 0.05;
};

struct Measurement {
  PlaneBox box;
  double confidence = 0.0;
};

struct Association {
  std::vector<std::pair<int, int>> matches;  // (track index, detection index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

// Two-stage assignment: high-confidence detections against all tracks, then
// remaining low-confidence detections against still-unmatched tracks. Costs
// are 1 - IoU, gated per stage; each stage is solved to optimality.
Association associate(const std::vector<TrackState>& predicted,
                      const std::vector<Measurement>& detections, const TrackerConfig& cfg);

class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg = {});

  // One filter prediction step; covariance grows by the process noise.
  TrackState predict_state(const TrackState& s) const;

  // Advances to frame t (strictly increasing) and returns the active tracks.
  std::vector<TrackState> step(int t, const std::vector<Measurement>& detections);

  const std::vector<TrackState>& tracks() const { return tracks_; }
  int lost_count() const;
  int next_id() const { return next_id_; }

 private:
  TrackState make_track(const Measurement& m, bool first_frame);
  void update_state(TrackState& s, const Measurement& m) const;

  TrackerConfig cfg_;
  std::vector<TrackState> tracks_;
  int next_id_ = 1;
  int last_frame_ = 0;
  bool saw_first_frame_ = false;
};

}  // namespace courtmot
