#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "courtmot/common.hpp"
#include "courtmot/geometry.hpp"

namespace courtmot {

struct DetectionSet {
  int frame = 0;
  std::vector<BevBox> boxes;
};

// Degradation knobs for the ground-truth oracle. Distances are meters on the
// BEV plane; rates are per player (miss) or expected count per frame (fp).
struct OracleNoiseModel {
  double position_sigma = 0.0;
  double size_jitter = 0.0;  // fractional
  double miss_rate = 0.0;
  double fp_rate = 0.0;
  double merge_distance = 0.0;  // 0 disables merging
  double merged_confidence = 0.4;
  double clean_confidence = 0.9;
};

class BevDetector {
 public:
  virtual ~BevDetector() = default;
  virtual DetectionSet detect(int frame, const BevImage* bev) = 0;
};

// Emits one box per ground-truth player, with misses, jitter, false positives
// and proximity merging. Deterministic per (seed, frame).
class OracleBevDetector : public BevDetector {
 public:
  OracleBevDetector(const SequenceTable& gt, BevGrid grid, OracleNoiseModel noise,
                    std::uint64_t seed);
  DetectionSet detect(int frame, const BevImage* bev) override;

 private:
  const SequenceTable& gt_;
  BevGrid grid_;
  OracleNoiseModel noise_;
  std::uint64_t seed_;
};

// Replays stored detections; frames with no entry yield an empty set.
class ReplayBevDetector : public BevDetector {
 public:
  ReplayBevDetector(std::map<int, std::vector<BevBox>> by_frame);
  DetectionSet detect(int frame, const BevImage* bev) override;

 private:
  std::map<int, std::vector<BevBox>> by_frame_;
};

double iou(const BevBox& a, const BevBox& b);

// Repeatedly replaces the highest-IoU pair at or above the threshold with its
// union box (max confidence) until no pair qualifies.
std::vector<BevBox> suppress_duplicates(std::vector<BevBox> boxes, double iou_threshold);

}  // namespace courtmot
