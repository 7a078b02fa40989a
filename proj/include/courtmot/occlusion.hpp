#pragma once

#include <vector>

#include "courtmot/common.hpp"

namespace courtmot {

// Per-frame active track IDs; entry i is frame i+1. IDs are kept sorted.
struct IdCountSeries {
  std::vector<std::vector<int>> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }
  int count_at(int t) const { return static_cast<int>(frames.at(t - 1).size()); }
  const std::vector<int>& ids_at(int t) const { return frames.at(t - 1); }
};

IdCountSeries series_from_table(const SequenceTable& table);

// a \ b, both sorted.
std::vector<int> diff_series(const std::vector<int>& a, const std::vector<int>& b);

struct OcclusionSession {
  int index = 0;    // 1-based
  int t_start = 0;  // first frame of the drop
  int t_end = 0;    // recovery frame; last frame when still open
  int n_ref = 0;
  std::vector<int> lost_ids;
  std::vector<int> gain_ids;
  std::vector<int> neighbor_lost_ids;
  std::vector<int> neighbor_gain_ids;
  bool open = false;
};

// Two-state scan over the count series: a drop below the previous count opens
// a session; recovery to at least the reference count closes it. A drop still
// open at the last frame is emitted flagged open.
std::vector<OcclusionSession> extract_sessions(const IdCountSeries& series);

// Same scan, plus neighbor sets: surviving IDs whose box sits within
// neighbor_radius of a lost ID at t_start-1 (resp. a gained ID at t_end).
std::vector<OcclusionSession> extract_sessions(const SequenceTable& table,
                                               double neighbor_radius);

}  // namespace courtmot
