#include "courtmot/detection.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace courtmot {

OracleBevDetector::OracleBevDetector(const SequenceTable& gt, BevGrid grid,
                                     OracleNoiseModel noise, std::uint64_t seed)
    : gt_(gt), grid_(grid), noise_(noise), seed_(seed) {
  grid_.validate();
  if (noise_.miss_rate < 0.0 || noise_.miss_rate > 1.0)
    throw ConfigError("OracleBevDetector: miss_rate outside [0,1]");
  if (noise_.fp_rate < 0.0 || noise_.merge_distance < 0.0 || noise_.position_sigma < 0.0 ||
      noise_.size_jitter < 0.0)
    throw ConfigError("OracleBevDetector: negative noise parameter");
}

DetectionSet OracleBevDetector::detect(int frame, const BevImage*) {
  DetectionSet out;
  out.frame = frame;
  if (frame < 1 || frame > gt_.frame_count()) return out;
  const auto& players = gt_.frame(frame);
  Rng rng(mix_seed(seed_, 0x6465746563ULL, static_cast<std::uint64_t>(frame)));

  // 1. Group players closer than merge_distance (single-link clusters).
  const int n = static_cast<int>(players.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  if (noise_.merge_distance > 0.0) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double d = std::hypot(players[i].box.cx - players[j].box.cx,
                                    players[i].box.cy - players[j].box.cy);
        if (d < noise_.merge_distance) parent[find(i)] = find(j);
      }
  }
  std::vector<std::vector<int>> clusters(n);
  for (int i = 0; i < n; ++i) clusters[find(i)].push_back(i);

  // 2. Clusters of one may be missed; merged clusters always report one box
  // covering the union footprint at the degraded confidence.
  for (int c = 0; c < n; ++c) {
    if (clusters[c].empty()) continue;
    if (clusters[c].size() == 1) {
      const bool missed = rng.uniform() < noise_.miss_rate;
      const PlaneBox& gt = players[clusters[c][0]].box;
      double jx = rng.gaussian(0.0, noise_.position_sigma);
      double jy = rng.gaussian(0.0, noise_.position_sigma);
      double jw = 1.0 + rng.gaussian(0.0, noise_.size_jitter);
      double jh = 1.0 + rng.gaussian(0.0, noise_.size_jitter);
      if (missed) continue;
      PlaneBox b{gt.cx + jx, gt.cy + jy, std::max(0.05, gt.w * jw), std::max(0.05, gt.h * jh)};
      out.boxes.push_back(bev_box_from_plane(b, grid_, noise_.clean_confidence));
    } else {
      Rect u = players[clusters[c][0]].box.rect();
      for (size_t k = 1; k < clusters[c].size(); ++k)
        u = rect_union(u, players[clusters[c][k]].box.rect());
      PlaneBox b = plane_box_from_rect(u);
      b.cx += rng.gaussian(0.0, noise_.position_sigma);
      b.cy += rng.gaussian(0.0, noise_.position_sigma);
      out.boxes.push_back(bev_box_from_plane(b, grid_, noise_.merged_confidence));
    }
  }

  // 3. False positives anywhere on the grid, sized like a typical player.
  const int fps = rng.poisson(noise_.fp_rate);
  for (int k = 0; k < fps; ++k) {
    BevBox b;
    b.w = 0.6 / grid_.resolution;
    b.h = 0.6 / grid_.resolution;
    b.x = rng.uniform(0.0, grid_.width - b.w);
    b.y = rng.uniform(0.0, grid_.height - b.h);
    b.confidence = rng.uniform(0.15, 0.95);
    out.boxes.push_back(b);
  }
  return out;
}

ReplayBevDetector::ReplayBevDetector(std::map<int, std::vector<BevBox>> by_frame)
    : by_frame_(std::move(by_frame)) {}

DetectionSet ReplayBevDetector::detect(int frame, const BevImage*) {
  DetectionSet out;
  out.frame = frame;
  auto it = by_frame_.find(frame);
  if (it != by_frame_.end()) out.boxes = it->second;
  return out;
}

double iou(const BevBox& a, const BevBox& b) { return iou(a.rect(), b.rect()); }

std::vector<BevBox> suppress_duplicates(std::vector<BevBox> boxes, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw ConfigError("suppress_duplicates: threshold outside (0,1]");
  for (;;) {
    double best = -1.0;
    int bi = -1, bj = -1;
    for (size_t i = 0; i < boxes.size(); ++i)
      for (size_t j = i + 1; j < boxes.size(); ++j) {
        const double v = iou(boxes[i], boxes[j]);
        if (v >= iou_threshold && v > best) {
          best = v;
          bi = static_cast<int>(i);
          bj = static_cast<int>(j);
        }
      }
    if (bi < 0) break;
    const Rect u = rect_union(boxes[bi].rect(), boxes[bj].rect());
    BevBox merged;
    merged.x = u.x0;
    merged.y = u.y0;
    merged.w = u.width();
    merged.h = u.height();
    merged.confidence = std::max(boxes[bi].confidence, boxes[bj].confidence);
    boxes.erase(boxes.begin() + bj);
    boxes[bi] = merged;
  }
  return boxes;
}

}  // namespace courtmot
