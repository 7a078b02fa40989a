#pragma once

#include <vector>

#include "courtmot/common.hpp"

namespace courtmot {

// Mean box diagonal over every GT box in the sequence; the default matching
// threshold.
double mean_gt_diagonal(const SequenceTable& gt);

struct PointMatchResult {
  std::vector<int> gt_to_pred;  // -1 = unmatched
  double total_distance = 0.0;
  int matched = 0;
};

// Min-total-distance one-to-one matching with pairs beyond the threshold
// forbidden; cardinality is maximized first.
PointMatchResult match_points(const std::vector<std::vector<double>>& dist, double threshold);

struct FramePairs {
  std::vector<std::pair<int, int>> pairs;  // (gt id, pred id)
  int fp = 0;
  int fn = 0;
};

struct SequenceMatch {
  std::vector<FramePairs> frames;  // frames[i] is frame i+1
  long tp = 0;
  long fp = 0;
  long fn = 0;
};

FramePairs match_frame(const std::vector<TrackedBox>& gt, const std::vector<TrackedBox>& pred,
                       double threshold);

SequenceMatch match_sequence(const SequenceTable& gt, const SequenceTable& pred,
                             double threshold);

struct MetricsReport {
  double mota = 0.0;
  double idf1 = 0.0;
  double hota = 0.0;
  double det_a = 0.0;
  double ass_a = 0.0;
  double r_id = 0.0;
  bool r_id_no_events = false;
  double hota_sweep = -1.0;  // mean over the threshold sweep; < 0 when off
  long tp = 0, fp = 0, fn = 0;
  long idsw = 0;
  long n_re = 0, n_dis = 0;
  long gt_total = 0, pred_total = 0;
  double distance_threshold = 0.0;
};

struct MetricsConfig {
  double distance_threshold = 0.0;  // <= 0 means mean GT diagonal
  bool hota_sweep = false;
};

double mota(const SequenceMatch& m, long gt_total, long idsw);
long count_id_switches(const SequenceMatch& m);
double idf1(const SequenceTable& gt, const SequenceTable& pred, double threshold,
            long* idtp_out = nullptr);

struct HotaResult {
  double hota = 0.0, det_a = 0.0, ass_a = 0.0;
};
HotaResult hota(const SequenceTable& gt, const SequenceTable& pred, const SequenceMatch& m);

struct IdRecovery {
  long n_dis = 0, n_re = 0;
  double rate = 1.0;
  bool no_events = true;
};
IdRecovery id_recovery_rate(const SequenceTable& gt, const SequenceMatch& m);

MetricsReport evaluate_sequence(const SequenceTable& gt, const SequenceTable& pred,
                                const MetricsConfig& cfg = {});

}  // namespace courtmot
