#include "courtmot/occlusion.hpp"

#include <algorithm>
#include <cmath>

namespace courtmot {

IdCountSeries series_from_table(const SequenceTable& table) {
  IdCountSeries s;
  s.frames.reserve(table.frames.size());
  for (int t = 1; t <= table.frame_count(); ++t) s.frames.push_back(table.ids_at(t));
  return s;
}

std::vector<int> diff_series(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<OcclusionSession> extract_sessions(const IdCountSeries& series) {
  std::vector<OcclusionSession> sessions;
  const int total = series.frame_count();
  bool occluding = false;
  OcclusionSession cur;
  for (int t = 2; t <= total; ++t) {
    const int nt = series.count_at(t);
    const int prev = series.count_at(t - 1);
    if (!occluding) {
      if (nt < prev) {
        occluding = true;
        cur = OcclusionSession{};
        cur.index = static_cast<int>(sessions.size()) + 1;
        cur.t_start = t;
        cur.n_ref = prev;
        cur.lost_ids = diff_series(series.ids_at(t - 1), series.ids_at(t));
      }
    } else if (nt >= cur.n_ref) {
      cur.t_end = t;
      cur.gain_ids = diff_series(series.ids_at(t), series.ids_at(t - 1));
      sessions.push_back(cur);
      occluding = false;
    }
  }
  if (occluding) {
    cur.t_end = total;
    cur.open = true;
    sessions.push_back(cur);
  }
  return sessions;
}

namespace {

std::vector<int> neighbors_within(const std::vector<TrackedBox>& frame,
                                  const std::vector<const TrackedBox*>& anchors,
                                  const std::vector<int>& exclude, double radius) {
  std::vector<int> out;
  for (const auto& b : frame) {
    if (std::binary_search(exclude.begin(), exclude.end(), b.id)) continue;
    for (const TrackedBox* a : anchors) {
      const double d = std::hypot(b.box.cx - a->box.cx, b.box.cy - a->box.cy);
      if (d <= radius) {
        out.push_back(b.id);
        break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<OcclusionSession> extract_sessions(const SequenceTable& table,
                                               double neighbor_radius) {
  std::vector<OcclusionSession> sessions = extract_sessions(series_from_table(table));
  for (auto& s : sessions) {
    // Anchors are the lost tracks' boxes just before the drop.
    std::vector<const TrackedBox*> lost_boxes;
    for (int id : s.lost_ids)
      if (const TrackedBox* b = table.find(s.t_start - 1, id)) lost_boxes.push_back(b);
    if (!lost_boxes.empty())
      s.neighbor_lost_ids =
          neighbors_within(table.frame(s.t_start - 1), lost_boxes, s.lost_ids, neighbor_radius);

    if (!s.open) {
      std::vector<const TrackedBox*> gain_boxes;
      for (int id : s.gain_ids)
        if (const TrackedBox* b = table.find(s.t_end, id)) gain_boxes.push_back(b);
      if (!gain_boxes.empty())
        s.neighbor_gain_ids =
            neighbors_within(table.frame(s.t_end), gain_boxes, s.gain_ids, neighbor_radius);
    }
  }
  return sessions;
}

}  // namespace courtmot
