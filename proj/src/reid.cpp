#include "courtmot/reid.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace courtmot {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : v_(std::move(values)) {
  if (v_.empty()) throw std::invalid_argument("EmbeddingVector: empty");
  double norm2 = 0.0;
  for (double x : v_) {
    if (!std::isfinite(x)) throw std::invalid_argument("EmbeddingVector: non-finite entry");
    norm2 += x * x;
  }
  if (norm2 <= 1e-24) throw std::invalid_argument("EmbeddingVector: zero vector");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v_) x *= inv;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0.0;
  for (int i = 0; i < a.dim(); ++i) dot += a.values()[i] * b.values()[i];
  return dot;
}

void StoredEmbeddingProvider::put(int id, int frame, int camera, EmbeddingVector v) {
  store_.emplace(std::make_tuple(id, frame, camera), std::move(v));
}

std::optional<EmbeddingVector> StoredEmbeddingProvider::embed(int track_id,
                                                              const FrameRef& ref) const {
  auto it = store_.find(std::make_tuple(track_id, ref.frame, ref.camera));
  if (it == store_.end())
    throw DataError("stored embedding missing for id " + std::to_string(track_id) + " frame " +
                    std::to_string(ref.frame) + " camera " + std::to_string(ref.camera));
  return it->second;
}

IdRemap resolve_session(const OcclusionSession& session, const SessionFeatures& features,
                        double min_cosine) {
  IdRemap out;
  out.session_index = session.index;
  out.t_end = session.t_end;

  struct Pair {
    double sim;
    int pre, post;
  };
  std::vector<Pair> pairs;
  for (const auto& [pre_id, pre_v] : features.pre)
    for (const auto& [post_id, post_v] : features.post)
      pairs.push_back({cosine(pre_v, post_v), pre_id, post_id});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    if (a.pre != b.pre) return a.pre < b.pre;
    return a.post < b.post;
  });

  const std::set<int> lost(session.lost_ids.begin(), session.lost_ids.end());
  const std::set<int> gained(session.gain_ids.begin(), session.gain_ids.end());
  std::set<int> pre_used, post_used;
  for (const auto& p : pairs) {
    if (p.sim < min_cosine) break;
    if (pre_used.count(p.pre) || post_used.count(p.post)) continue;
    pre_used.insert(p.pre);
    post_used.insert(p.post);
    // A pair involving a surviving neighbour on either side consumes both ids
    // but renames nothing; only a genuinely lost pre matched to a genuinely
    // gained post can justify rewriting history.
    if (p.pre != p.post && lost.count(p.pre) && gained.count(p.post))
      out.post_to_pre.emplace_back(p.post, p.pre);
  }
  std::sort(out.post_to_pre.begin(), out.post_to_pre.end());
  return out;
}

std::vector<RemapOutcome> apply_remap(SequenceTable& table, const std::vector<IdRemap>& remaps) {
  std::vector<RemapOutcome> outcomes;
  outcomes.reserve(remaps.size());

  // Composition of every rename applied so far, kept flat so lookup is one
  // step. A session may swap two ids outright (both can reappear after a
  // tracker gap), so chain walking is not an option here.
  std::map<int, int> current;
  auto resolve = [&](int id) {
    auto it = current.find(id);
    return it == current.end() ? id : it->second;
  };

  std::vector<IdRemap> ordered = remaps;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const IdRemap& a, const IdRemap& b) { return a.t_end < b.t_end; });

  for (const auto& remap : ordered) {
    RemapOutcome oc;
    oc.session_index = remap.session_index;
    if (remap.post_to_pre.empty()) {
      oc.applied = true;
      oc.reason = "no pairs";
      outcomes.push_back(oc);
      continue;
    }

    std::map<int, int> rename;  // simultaneous within the session
    for (const auto& [post, pre] : remap.post_to_pre) {
      const int from = resolve(post);
      const int to = resolve(pre);
      if (from != to) rename[from] = to;
    }

    // Dry run: renaming must keep ids unique in every affected frame.
    bool ok = true;
    for (int t = remap.t_end; t <= table.frame_count() && ok; ++t) {
      std::set<int> seen;
      for (const auto& b : table.frame(t)) {
        auto it = rename.find(b.id);
        const int nid = it == rename.end() ? b.id : it->second;
        if (!seen.insert(nid).second) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) {
      oc.applied = false;
      oc.reason = "rename would duplicate an id within a frame";
      outcomes.push_back(oc);
      continue;
    }

    for (int t = remap.t_end; t <= table.frame_count(); ++t)
      for (auto& b : table.frame(t)) {
        auto it = rename.find(b.id);
        if (it != rename.end()) b.id = it->second;
      }
    for (auto& [raw, mapped] : current) {
      auto it = rename.find(mapped);
      if (it != rename.end()) mapped = it->second;
    }
    for (const auto& [from, to] : rename) {
      if (!current.count(from)) current[from] = to;
      oc.applied_pairs.emplace_back(from, to);
    }
    oc.applied = true;
    outcomes.push_back(oc);
  }
  table.sort_frames();
  return outcomes;
}

}  // namespace courtmot
