#pragma once

#include <optional>
#include <vector>

#include "courtmot/common.hpp"
#include "courtmot/geometry.hpp"

namespace courtmot {

struct SearchConfig {
  double tau_high = 0.5;
  double tau_low = 0.2;
  int max_search_frames = 30;
  double z_min = 0.0;
  double z_max = 1.9;
};

struct PixelDetection {
  Rect box;
  double confidence = 0.0;
};

class CameraDetectionProvider {
 public:
  virtual ~CameraDetectionProvider() = default;
  virtual std::vector<PixelDetection> detections(int camera, int frame) const = 0;
};

struct FrameRef {
  int camera = -1;
  int frame = 0;
  Rect projected_box;      // clamped to the image
  Rect matched_image_box;  // the detection the clarity gate accepted
};

enum class SearchDirection { Backward, Forward };

// Number of the target's projected corners falling inside any other box's
// projection; each corner counts at most once. nullopt = target not projectable.
std::optional<int> corner_inclusion_count(const PlaneBox& target,
                                          const std::vector<PlaneBox>& others,
                                          const CameraModel& cam, const SearchConfig& cfg);

struct CameraScore {
  int camera = -1;
  int inclusion_count = 0;
  double unclamped_area = 0.0;
};

// Least-occluded camera: minimum corner-inclusion count, ties broken by the
// larger projected area. Cameras that cannot see the target are skipped.
std::optional<CameraScore> select_camera(const PlaneBox& target,
                                         const std::vector<PlaneBox>& others,
                                         const std::vector<CameraModel>& cameras,
                                         const SearchConfig& cfg);

// Pure tie-break core, exposed for direct verification.
std::optional<int> pick_best_camera(const std::vector<std::optional<CameraScore>>& scores);

enum class Clarity { Clear, Ambiguous };

struct ClarityResult {
  Clarity verdict = Clarity::Ambiguous;
  Rect matched_box;
};

// Clear iff exactly one detection overlaps at/above tau_high and every other
// stays below tau_low.
ClarityResult clarity_gate(const Rect& projected_box,
                           const std::vector<PixelDetection>& detections,
                           const SearchConfig& cfg);

struct SearchContext {
  const SequenceTable* tracks = nullptr;
  PlaneBox target_fallback;  // used on frames where the id has no track state
  const std::vector<CameraModel>* cameras = nullptr;
  const CameraDetectionProvider* detections = nullptr;
  int t_min = 1;
  int t_max = 1;
};

// Walks frames away from t0 (backward: t0, t0-1, ...; forward: t0, t0+1, ...)
// until a camera pick passes the clarity gate or max_search_frames visits.
std::optional<FrameRef> frame_search(int target_id, int t0, SearchDirection direction,
                                     const SearchConfig& cfg, const SearchContext& ctx);

}  // namespace courtmot
