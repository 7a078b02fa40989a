#include "courtmot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "courtmot/assignment.hpp"

namespace courtmot {

double mean_gt_diagonal(const SequenceTable& gt) {
  double sum = 0.0;
  long n = 0;
  for (const auto& frame : gt.frames)
    for (const auto& b : frame) {
      sum += b.box.diagonal();
      ++n;
    }
  if (n == 0) throw DataError("mean_gt_diagonal: no ground-truth boxes");
  return sum / static_cast<double>(n);
}

PointMatchResult match_points(const std::vector<std::vector<double>>& dist, double threshold) {
  PointMatchResult out;
  const int n = static_cast<int>(dist.size());
  out.gt_to_pred.assign(n, -1);
  if (n == 0 || dist[0].empty()) return out;
  std::vector<std::vector<char>> allowed(n, std::vector<char>(dist[0].size()));
  for (int i = 0; i < n; ++i)
    for (size_t j = 0; j < dist[i].size(); ++j) allowed[i][j] = dist[i][j] <= threshold ? 1 : 0;
  const AssignmentResult res = solve_assignment(dist, allowed);
  out.gt_to_pred = res.row_to_col;
  out.total_distance = res.total_cost;
  out.matched = res.matched;
  return out;
}

FramePairs match_frame(const std::vector<TrackedBox>& gt, const std::vector<TrackedBox>& pred,
                       double threshold) {
  FramePairs out;
  std::vector<std::vector<double>> dist(gt.size(), std::vector<double>(pred.size(), 0.0));
  for (size_t i = 0; i < gt.size(); ++i)
    for (size_t j = 0; j < pred.size(); ++j)
      dist[i][j] = std::hypot(gt[i].box.cx - pred[j].box.cx, gt[i].box.cy - pred[j].box.cy);
  const PointMatchResult m = match_points(dist, threshold);
  for (size_t i = 0; i < gt.size(); ++i)
    if (m.gt_to_pred[i] >= 0) out.pairs.emplace_back(gt[i].id, pred[m.gt_to_pred[i]].id);
  std::sort(out.pairs.begin(), out.pairs.end());
  out.fn = static_cast<int>(gt.size()) - m.matched;
  out.fp = static_cast<int>(pred.size()) - m.matched;
  return out;
}

SequenceMatch match_sequence(const SequenceTable& gt, const SequenceTable& pred,
                             double threshold) {
  SequenceMatch out;
  const int frames = std::max(gt.frame_count(), pred.frame_count());
  out.frames.resize(frames);
  static const std::vector<TrackedBox> kEmpty;
  for (int t = 1; t <= frames; ++t) {
    const auto& g = t <= gt.frame_count() ? gt.frame(t) : kEmpty;
    const auto& p = t <= pred.frame_count() ? pred.frame(t) : kEmpty;
    out.frames[t - 1] = match_frame(g, p, threshold);
    out.tp += static_cast<long>(out.frames[t - 1].pairs.size());
    out.fp += out.frames[t - 1].fp;
    out.fn += out.frames[t - 1].fn;
  }
  return out;
}

long count_id_switches(const SequenceMatch& m) {
  std::map<int, int> last_pred;  // gt id -> most recent matched pred id
  long idsw = 0;
  for (const auto& f : m.frames)
    for (const auto& [g, p] : f.pairs) {
      auto it = last_pred.find(g);
      if (it != last_pred.end() && it->second != p) ++idsw;
      last_pred[g] = p;
    }
  return idsw;
}

double mota(const SequenceMatch& m, long gt_total, long idsw) {
  if (gt_total == 0) throw DataError("mota: empty ground truth");
  return 1.0 - static_cast<double>(m.fp + m.fn + idsw) / static_cast<double>(gt_total);
}

double idf1(const SequenceTable& gt, const SequenceTable& pred, double threshold,
            long* idtp_out) {
  // Per-trajectory presence counts and pairwise within-threshold overlaps.
  std::map<int, long> gt_len, pred_len;
  std::map<std::pair<int, int>, long> overlap;
  const int frames = std::max(gt.frame_count(), pred.frame_count());
  for (int t = 1; t <= frames; ++t) {
    if (t <= gt.frame_count())
      for (const auto& g : gt.frame(t)) ++gt_len[g.id];
    if (t <= pred.frame_count())
      for (const auto& p : pred.frame(t)) ++pred_len[p.id];
    if (t > gt.frame_count() || t > pred.frame_count()) continue;
    for (const auto& g : gt.frame(t))
      for (const auto& p : pred.frame(t)) {
        const double d = std::hypot(g.box.cx - p.box.cx, g.box.cy - p.box.cy);
        if (d <= threshold) ++overlap[{g.id, p.id}];
      }
  }
  long gt_total = 0, pred_total = 0;
  for (auto& [id, n] : gt_len) gt_total += n;
  for (auto& [id, n] : pred_len) pred_total += n;
  if (gt_total + pred_total == 0) return 0.0;

  // Optimal id bijection maximizing the total overlap.
  std::vector<int> gt_ids, pred_ids;
  for (auto& [id, n] : gt_len) gt_ids.push_back(id);
  for (auto& [id, n] : pred_len) pred_ids.push_back(id);
  long idtp = 0;
  if (!gt_ids.empty() && !pred_ids.empty()) {
    std::vector<std::vector<double>> cost(gt_ids.size(),
                                          std::vector<double>(pred_ids.size(), 0.0));
    for (size_t i = 0; i < gt_ids.size(); ++i)
      for (size_t j = 0; j < pred_ids.size(); ++j) {
        auto it = overlap.find({gt_ids[i], pred_ids[j]});
        cost[i][j] = it == overlap.end() ? 0.0 : -static_cast<double>(it->second);
      }
    const AssignmentResult res = solve_assignment(cost);
    idtp = static_cast<long>(std::llround(-res.total_cost));
  }
  if (idtp_out) *idtp_out = idtp;
  const long idfn = gt_total - idtp;
  const long idfp = pred_total - idtp;
  return 2.0 * static_cast<double>(idtp) /
         static_cast<double>(2 * idtp + idfp + idfn);
}

HotaResult hota(const SequenceTable& gt, const SequenceTable& pred, const SequenceMatch& m) {
  HotaResult out;
  const long det_den = m.tp + m.fp + m.fn;
  if (m.tp == 0) return out;  // no matches: all components zero
  out.det_a = static_cast<double>(m.tp) / static_cast<double>(det_den);

  std::map<std::pair<int, int>, long> tpa;
  for (const auto& f : m.frames)
    for (const auto& [g, p] : f.pairs) ++tpa[{g, p}];

  // FNA/FPA count every frame where the trajectory appears without this
  // pairing, including unmatched appearances.
  std::map<int, long> gt_len, pred_len;
  for (const auto& f : gt.frames)
    for (const auto& b : f) ++gt_len[b.id];
  for (const auto& f : pred.frames)
    for (const auto& b : f) ++pred_len[b.id];

  double acc = 0.0;
  for (const auto& [pair, n] : tpa) {
    const long den = gt_len[pair.first] + pred_len[pair.second] - n;
    acc += static_cast<double>(n) * (static_cast<double>(n) / static_cast<double>(den));
  }
  out.ass_a = acc / static_cast<double>(m.tp);
  out.hota = std::sqrt(out.det_a * out.ass_a);
  return out;
}

IdRecovery id_recovery_rate(const SequenceTable& gt, const SequenceMatch& m) {
  IdRecovery out;
  // Chronological matched-pred history per gt id, with presence flags.
  struct Event {
    int gt, pred, frame;
  };
  std::vector<Event> events;
  std::map<int, int> cur;  // gt id -> current matched pred id
  std::map<std::pair<int, int>, std::vector<int>> match_frames;

  const int frames = static_cast<int>(m.frames.size());
  for (int t = 1; t <= frames; ++t) {
    std::map<int, int> matched;
    for (const auto& [g, p] : m.frames[t - 1].pairs) {
      matched[g] = p;
      match_frames[{g, p}].push_back(t);
    }
    std::vector<int> present;
    if (t <= gt.frame_count())
      for (const auto& b : gt.frame(t)) present.push_back(b.id);

    for (int g : present) {
      auto c = cur.find(g);
      auto mt = matched.find(g);
      if (c != cur.end()) {
        if (mt == matched.end()) {
          events.push_back({g, c->second, t});  // pred id disappeared
          cur.erase(c);
        } else if (mt->second != c->second) {
          events.push_back({g, c->second, t});  // switched to another pred
          cur[g] = mt->second;
        }
      } else if (mt != matched.end()) {
        cur[g] = mt->second;
      }
    }
    // GT ids absent this frame close silently.
    for (auto it = cur.begin(); it != cur.end();) {
      if (std::find(present.begin(), present.end(), it->first) == present.end())
        it = cur.erase(it);
      else
        ++it;
    }
  }

  out.n_dis = static_cast<long>(events.size());
  for (const auto& e : events) {
    const auto& fs = match_frames[{e.gt, e.pred}];
    if (std::upper_bound(fs.begin(), fs.end(), e.frame) != fs.end()) ++out.n_re;
  }
  out.no_events = out.n_dis == 0;
  out.rate = out.no_events ? 1.0
                           : static_cast<double>(out.n_re) / static_cast<double>(out.n_dis);
  return out;
}

MetricsReport evaluate_sequence(const SequenceTable& gt, const SequenceTable& pred,
                                const MetricsConfig& cfg) {
  MetricsReport rep;
  rep.distance_threshold =
      cfg.distance_threshold > 0.0 ? cfg.distance_threshold : mean_gt_diagonal(gt);

  const SequenceMatch m = match_sequence(gt, pred, rep.distance_threshold);
  rep.tp = m.tp;
  rep.fp = m.fp;
  rep.fn = m.fn;
  for (const auto& f : gt.frames) rep.gt_total += static_cast<long>(f.size());
  for (const auto& f : pred.frames) rep.pred_total += static_cast<long>(f.size());

  rep.idsw = count_id_switches(m);
  rep.mota = mota(m, rep.gt_total, rep.idsw);
  rep.idf1 = idf1(gt, pred, rep.distance_threshold);
  const HotaResult h = hota(gt, pred, m);
  rep.hota = h.hota;
  rep.det_a = h.det_a;
  rep.ass_a = h.ass_a;
  const IdRecovery r = id_recovery_rate(gt, m);
  rep.n_dis = r.n_dis;
  rep.n_re = r.n_re;
  rep.r_id = r.rate;
  rep.r_id_no_events = r.no_events;

  if (cfg.hota_sweep) {
    double acc = 0.0;
    for (int k = 1; k <= 19; ++k) {
      const double thr = rep.distance_threshold * (static_cast<double>(k) / 20.0);
      const HotaResult hk = hota(gt, pred, match_sequence(gt, pred, thr));
      acc += hk.hota;
    }
    rep.hota_sweep = acc / 19.0;
  }
  return rep;
}

}  // namespace courtmot
