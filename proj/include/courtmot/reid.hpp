#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "courtmot/common.hpp"
#include "courtmot/matching.hpp"
#include "courtmot/occlusion.hpp"

namespace courtmot {

// Unit-norm appearance vector; zero or non-finite input is rejected.
class EmbeddingVector {
 public:
  explicit EmbeddingVector(std::vector<double> values);
  const std::vector<double>& values() const { return v_; }
  int dim() const { return static_cast<int>(v_.size()); }

 private:
  std::vector<double> v_;
};

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::optional<EmbeddingVector> embed(int track_id, const FrameRef& ref) const = 0;
};

// Lookup table keyed (id, frame, camera), typically loaded from a file.
// A lookup the table does not cover throws: stored vectors are supposed to
// be complete for the run they were exported from.
class StoredEmbeddingProvider : public EmbeddingProvider {
 public:
  void put(int id, int frame, int camera, EmbeddingVector v);
  std::optional<EmbeddingVector> embed(int track_id, const FrameRef& ref) const override;
  const std::map<std::tuple<int, int, int>, EmbeddingVector>& entries() const { return store_; }

 private:
  std::map<std::tuple<int, int, int>, EmbeddingVector> store_;
};

struct SessionFeatures {
  std::map<int, EmbeddingVector> pre;   // lost + neighbor-lost side
  std::map<int, EmbeddingVector> post;  // gain + neighbor-gain side
};

struct IdRemap {
  int session_index = 0;
  int t_end = 0;
  std::vector<std::pair<int, int>> post_to_pre;  // injective
};

// Greedy highest-cosine pairing over the full pre x post product. A pre/post
// pair sharing the same id consumes both sides and emits nothing. Pairs below
// min_cosine are not taken.
IdRemap resolve_session(const OcclusionSession& session, const SessionFeatures& features,
                        double min_cosine = -1.0);

struct RemapOutcome {
  int session_index = 0;
  bool applied = false;
  std::vector<std::pair<int, int>> applied_pairs;  // after chain translation
  std::string reason;
};

// Applies per-session renames from each session's t_end onward, in session
// order. Earlier renames chain into later ones; a rename that would duplicate
// an id within a frame rejects that whole session.
std::vector<RemapOutcome> apply_remap(SequenceTable& table, const std::vector<IdRemap>& remaps);

}  // namespace courtmot
