#include "courtmot/tracker.hpp"

#include <algorithm>
#include <cmath>

#include "courtmot/assignment.hpp"

namespace courtmot {

namespace {

// Kalman sub-state indices within the 6-dim mean.
constexpr int kIdx[4] = {0, 1, 4, 5};  // cx, cy, vx, vy

Eigen::Matrix4d kf_cov(const TrackState& s) {
  Eigen::Matrix4d p;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) p(i, j) = s.covariance(kIdx[i], kIdx[j]);
  return p;
}

void set_kf_cov(TrackState& s, const Eigen::Matrix4d& p) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s.covariance(kIdx[i], kIdx[j]) = p(i, j);
}

double gated_cost(const PlaneBox& a, const PlaneBox& b, double gate) {
  const Rect ra = a.rect(), rb = b.rect();
  if (ra.degenerate() || rb.degenerate()) return gate + 1.0;
  return 1.0 - iou(ra, rb);
}

Association solve_stage(const std::vector<TrackState>& predicted,
                        const std::vector<Measurement>& detections,
                        const std::vector<int>& track_idx, const std::vector<int>& det_idx,
                        double gate, Association& out) {
  if (track_idx.empty() || det_idx.empty()) return out;
  std::vector<std::vector<double>> cost(track_idx.size(),
                                        std::vector<double>(det_idx.size(), 0.0));
  std::vector<std::vector<char>> allowed(track_idx.size(),
                                         std::vector<char>(det_idx.size(), 1));
  for (size_t i = 0; i < track_idx.size(); ++i)
    for (size_t j = 0; j < det_idx.size(); ++j) {
      const double c = gated_cost(predicted[track_idx[i]].box(), detections[det_idx[j]].box, gate);
      cost[i][j] = std::min(c, gate + 1.0);
      allowed[i][j] = c <= gate ? 1 : 0;
    }
  const AssignmentResult res = solve_assignment(cost, allowed);
  for (size_t i = 0; i < track_idx.size(); ++i)
    if (res.row_to_col[i] >= 0)
      out.matches.emplace_back(track_idx[i], det_idx[res.row_to_col[i]]);
  return out;
}

}  // namespace

Association associate(const std::vector<TrackState>& predicted,
                      const std::vector<Measurement>& detections, const TrackerConfig& cfg) {
  Association out;

  // 1. Split detections by confidence; below low_conf is discarded.
  std::vector<int> high, low;
  for (size_t j = 0; j < detections.size(); ++j) {
    if (detections[j].confidence >= cfg.high_conf_threshold)
      high.push_back(static_cast<int>(j));
    else if (detections[j].confidence >= cfg.low_conf_threshold)
      low.push_back(static_cast<int>(j));
  }

  std::vector<int> all_tracks(predicted.size());
  for (size_t i = 0; i < predicted.size(); ++i) all_tracks[i] = static_cast<int>(i);

  // 2. First pass: high-confidence detections against every track.
  solve_stage(predicted, detections, all_tracks, high, cfg.match_threshold_stage1, out);

  std::vector<char> track_taken(predicted.size(), 0), det_taken(detections.size(), 0);
  for (auto& [ti, dj] : out.matches) {
    track_taken[ti] = 1;
    det_taken[dj] = 1;
  }

  // 3. Second pass: remaining low-confidence detections against the tracks
  // the first pass left unmatched, with the tighter gate.
  std::vector<int> rest_tracks;
  for (size_t i = 0; i < predicted.size(); ++i)
    if (!track_taken[i]) rest_tracks.push_back(static_cast<int>(i));
  solve_stage(predicted, detections, rest_tracks, low, cfg.match_threshold_stage2, out);
  for (auto& [ti, dj] : out.matches) {
    track_taken[ti] = 1;
    det_taken[dj] = 1;
  }

  for (size_t i = 0; i < predicted.size(); ++i)
    if (!track_taken[i]) out.unmatched_tracks.push_back(static_cast<int>(i));
  for (size_t j = 0; j < detections.size(); ++j)
    if (!det_taken[j]) out.unmatched_detections.push_back(static_cast<int>(j));
  return out;
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(cfg) {}

TrackState Tracker::predict_state(const TrackState& s) const {
  TrackState out = s;
  out.mean(0) += s.mean(4);
  out.mean(1) += s.mean(5);
  const double h = std::max(0.1, s.mean(3));
  const double qp = cfg_.pos_noise_weight * h;
  const double qv = cfg_.vel_noise_weight * h;

  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 2) = 1.0;
  f(1, 3) = 1.0;
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  q(0, 0) = q(1, 1) = qp * qp;
  q(2, 2) = q(3, 3) = qv * qv;
  Eigen::Matrix4d p = f * kf_cov(s) * f.transpose() + q;
  set_kf_cov(out, p);
  out.covariance(2, 2) += qp * qp;
  out.covariance(3, 3) += qp * qp;
  out.covariance = ((out.covariance + out.covariance.transpose()) / 2.0).eval();
  return out;
}

void Tracker::update_state(TrackState& s, const Measurement& m) const {
  const double h = std::max(0.1, s.mean(3));
  const double r = cfg_.meas_noise_weight * h;

  Eigen::Matrix<double, 2, 4> hm = Eigen::Matrix<double, 2, 4>::Zero();
  hm(0, 0) = hm(1, 1) = 1.0;
  const Eigen::Matrix4d p = kf_cov(s);
  const Eigen::Matrix2d rm = Eigen::Matrix2d::Identity() * (r * r);
  const Eigen::Matrix2d sm = hm * p * hm.transpose() + rm;
  const Eigen::Matrix<double, 4, 2> k = p * hm.transpose() * sm.inverse();
  Eigen::Vector2d z(m.box.cx, m.box.cy);
  Eigen::Vector4d x(s.mean(0), s.mean(1), s.mean(4), s.mean(5));
  const Eigen::Vector4d xn = x + k * (z - hm * x);
  const Eigen::Matrix4d pn = (Eigen::Matrix4d::Identity() - k * hm) * p;
  s.mean(0) = xn(0);
  s.mean(1) = xn(1);
  s.mean(4) = xn(2);
  s.mean(5) = xn(3);
  set_kf_cov(s, pn);

  const double a = cfg_.size_smoothing;
  s.mean(2) = a * m.box.w + (1.0 - a) * s.mean(2);
  s.mean(3) = a * m.box.h + (1.0 - a) * s.mean(3);
  s.covariance(2, 2) = (1.0 - a) * s.covariance(2, 2) + a * (r * r);
  s.covariance(3, 3) = (1.0 - a) * s.covariance(3, 3) + a * (r * r);
  s.covariance = ((s.covariance + s.covariance.transpose()) / 2.0).eval();
}

TrackState Tracker::make_track(const Measurement& m, bool first_frame) {
  TrackState s;
  s.id = next_id_++;
  s.mean << m.box.cx, m.box.cy, m.box.w, m.box.h, 0.0, 0.0;
  const double h = std::max(0.1, m.box.h);
  const double sp = 2.0 * cfg_.pos_noise_weight * h;
  const double sv = 10.0 * cfg_.vel_noise_weight * h;
  s.covariance = Eigen::Matrix<double, 6, 6>::Zero();
  s.covariance(0, 0) = s.covariance(1, 1) = sp * sp;
  s.covariance(2, 2) = s.covariance(3, 3) = sp * sp;
  s.covariance(4, 4) = s.covariance(5, 5) = sv * sv;
  s.hits = 1;
  s.frames_since_update = 0;
  s.status = (first_frame || cfg_.min_hits_to_activate <= 1) ? TrackStatus::Active
                                                             : TrackStatus::Tentative;
  return s;
}

int Tracker::lost_count() const {
  int n = 0;
  for (const auto& t : tracks_)
    if (t.status == TrackStatus::Lost) ++n;
  return n;
}

std::vector<TrackState> Tracker::step(int t, const std::vector<Measurement>& detections) {
  if (saw_first_frame_ && t <= last_frame_)
    throw DataError("tracker: out-of-order frame " + std::to_string(t));
  const bool first_frame = !saw_first_frame_;
  saw_first_frame_ = true;
  last_frame_ = t;

  // 1. Predict every live track.
  for (auto& s : tracks_) s = predict_state(s);

  // 2. Two-stage association on the predicted states.
  const Association assoc = associate(tracks_, detections, cfg_);

  // 3. Matched tracks update; lost ones re-activate, tentatives accumulate
  // hits until activation.
  for (auto& [ti, dj] : assoc.matches) {
    TrackState& s = tracks_[ti];
    update_state(s, detections[dj]);
    s.frames_since_update = 0;
    ++s.hits;
    if (s.status == TrackStatus::Lost) s.status = TrackStatus::Active;
    if (s.status == TrackStatus::Tentative && s.hits >= cfg_.min_hits_to_activate)
      s.status = TrackStatus::Active;
  }

  // 4. Unmatched active tracks go lost; unmatched tentatives are dropped;
  // lost tracks beyond the budget are dropped.
  std::vector<char> remove(tracks_.size(), 0);
  for (int ti : assoc.unmatched_tracks) {
    TrackState& s = tracks_[ti];
    ++s.frames_since_update;
    if (s.status == TrackStatus::Tentative) {
      remove[ti] = 1;
    } else {
      s.status = TrackStatus::Lost;
      if (s.frames_since_update > cfg_.max_lost_frames) remove[ti] = 1;
    }
  }
  std::vector<TrackState> kept;
  kept.reserve(tracks_.size());
  for (size_t i = 0; i < tracks_.size(); ++i)
    if (!remove[i]) kept.push_back(std::move(tracks_[i]));
  tracks_ = std::move(kept);

  // 5. Leftover high-confidence detections spawn new tracks.
  for (int dj : assoc.unmatched_detections)
    if (detections[dj].confidence >= cfg_.high_conf_threshold)
      tracks_.push_back(make_track(detections[dj], first_frame));

  std::vector<TrackState> active;
  for (const auto& s : tracks_)
    if (s.status == TrackStatus::Active) active.push_back(s);
  std::sort(active.begin(), active.end(),
            [](const TrackState& a, const TrackState& b) { return a.id < b.id; });
  return active;
}

}  // namespace courtmot
