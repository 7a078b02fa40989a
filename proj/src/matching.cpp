#include "courtmot/matching.hpp"

#include <algorithm>

namespace courtmot {

namespace {

std::optional<ProjectedBox> project_box(const PlaneBox& box, const CameraModel& cam,
                                        const SearchConfig& cfg) {
  const Rect fp = box.rect();
  if (fp.degenerate()) return std::nullopt;
  return project(voxel_from_rect(fp, cfg.z_min, cfg.z_max), cam);
}

bool sees_image(const ProjectedBox& p, const CameraModel& cam) {
  const Rect inter = intersect(p.unclamped, cam.image_rect());
  return inter.width() > 0.0 && inter.height() > 0.0;
}

}  // namespace

std::optional<int> corner_inclusion_count(const PlaneBox& target,
                                          const std::vector<PlaneBox>& others,
                                          const CameraModel& cam, const SearchConfig& cfg) {
  const auto proj = project_box(target, cam, cfg);
  if (!proj || !sees_image(*proj, cam)) return std::nullopt;

  std::vector<Rect> other_boxes;
  other_boxes.reserve(others.size());
  for (const auto& o : others)
    if (auto p = project_box(o, cam, cfg)) other_boxes.push_back(p->unclamped);

  int count = 0;
  for (const auto& corner : proj->corners) {
    for (const auto& b : other_boxes) {
      if (b.contains(corner.x(), corner.y())) {
        ++count;
        break;  // each corner counts at most once
      }
    }
  }
  return count;
}

std::optional<int> pick_best_camera(const std::vector<std::optional<CameraScore>>& scores) {
  int best = -1;
  for (size_t c = 0; c < scores.size(); ++c) {
    if (!scores[c]) continue;
    if (best < 0 || scores[c]->inclusion_count < scores[best]->inclusion_count ||
        (scores[c]->inclusion_count == scores[best]->inclusion_count &&
         scores[c]->unclamped_area > scores[best]->unclamped_area))
      best = static_cast<int>(c);
  }
  if (best < 0) return std::nullopt;
  return best;
}

std::optional<CameraScore> select_camera(const PlaneBox& target,
                                         const std::vector<PlaneBox>& others,
                                         const std::vector<CameraModel>& cameras,
                                         const SearchConfig& cfg) {
  std::vector<std::optional<CameraScore>> scores(cameras.size());
  for (size_t c = 0; c < cameras.size(); ++c) {
    const auto count = corner_inclusion_count(target, others, cameras[c], cfg);
    if (!count) continue;
    const auto proj = project_box(target, cameras[c], cfg);
    scores[c] = CameraScore{static_cast<int>(c), *count, proj->unclamped_area};
  }
  const auto best = pick_best_camera(scores);
  if (!best) return std::nullopt;
  return scores[*best];
}

ClarityResult clarity_gate(const Rect& projected_box,
                           const std::vector<PixelDetection>& detections,
                           const SearchConfig& cfg) {
  ClarityResult out;
  if (projected_box.degenerate()) return out;
  int strong = 0;
  bool mid = false;
  for (const auto& d : detections) {
    if (d.box.degenerate()) continue;
    const double v = iou(projected_box, d.box);
    if (v >= cfg.tau_high) {
      ++strong;
      out.matched_box = d.box;
    } else if (v >= cfg.tau_low) {
      mid = true;
    }
  }
  if (strong == 1 && !mid) out.verdict = Clarity::Clear;
  else out.verdict = Clarity::Ambiguous;
  if (out.verdict == Clarity::Ambiguous) out.matched_box = Rect{};
  return out;
}

std::optional<FrameRef> frame_search(int target_id, int t0, SearchDirection direction,
                                     const SearchConfig& cfg, const SearchContext& ctx) {
  const int step = direction == SearchDirection::Backward ? -1 : 1;
  int t = t0;
  for (int visited = 0; visited < cfg.max_search_frames; ++visited, t += step) {
    if (t < ctx.t_min || t > ctx.t_max) break;

    PlaneBox target = ctx.target_fallback;
    std::vector<PlaneBox> others;
    for (const auto& b : ctx.tracks->frame(t)) {
      if (b.id == target_id)
        target = b.box;
      else
        others.push_back(b.box);
    }

    const auto pick = select_camera(target, others, *ctx.cameras, cfg);
    if (!pick) continue;
    const auto proj = project(voxel_from_rect(target.rect(), cfg.z_min, cfg.z_max),
                              (*ctx.cameras)[pick->camera]);
    const ClarityResult clarity =
        clarity_gate(proj->clamped, ctx.detections->detections(pick->camera, t), cfg);
    if (clarity.verdict == Clarity::Clear) {
      FrameRef ref;
      ref.camera = pick->camera;
      ref.frame = t;
      ref.projected_box = proj->clamped;
      ref.matched_image_box = clarity.matched_box;
      return ref;
    }
  }
  return std::nullopt;
}

}  // namespace courtmot
