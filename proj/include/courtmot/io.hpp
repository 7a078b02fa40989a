#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "courtmot/common.hpp"
#include "courtmot/detection.hpp"
#include "courtmot/geometry.hpp"
#include "courtmot/matching.hpp"
#include "courtmot/metrics.hpp"
#include "courtmot/occlusion.hpp"
#include "courtmot/reid.hpp"
#include "courtmot/simulator.hpp"

namespace courtmot {

// All writers emit fixed-precision decimal text so identical inputs produce
// identical bytes. Readers reject malformed lines with the file name and
// line number in the error.

std::string fmt_double(double v, int precision = 6);

void write_cloud(const std::string& path, const PointCloud& cloud);
PointCloud read_cloud(const std::string& path);

// One line per box: t id cx cy w h  (meters, t is the 1-based frame index).
void write_tracks(const std::string& path, const SequenceTable& table);
SequenceTable read_tracks(const std::string& path);

// One line per detection: t id_hint cx cy w h conf  (meters on the court
// plane; id_hint is -1 when the producer has no identity to offer).
void write_plane_detections(const std::string& path,
                            const std::map<int, std::vector<BevBox>>& dets,
                            const BevGrid& grid);
std::map<int, std::vector<BevBox>> read_plane_detections(const std::string& path,
                                                         const BevGrid& grid);

// One line per box: t id x y w h vis  (pixels, x y is the top-left corner).
void write_camera_gt(const std::string& path,
                     const std::vector<std::vector<CameraGtBox>>& frames);
std::vector<std::vector<CameraGtBox>> read_camera_gt(const std::string& path);

// One line per detection: t id_hint x y w h conf  (pixels, top-left corner).
void write_camera_detections(const std::string& path,
                             const std::map<int, std::vector<PixelDetection>>& dets);
std::map<int, std::vector<PixelDetection>> read_camera_detections(const std::string& path);

// One line per vector: id t camera v1 ... vd (all vectors share one d).
void write_embeddings(const std::string& path, const StoredEmbeddingProvider& provider);
StoredEmbeddingProvider read_embeddings(const std::string& path);

void write_sessions(const std::string& path, const std::vector<OcclusionSession>& sessions);

struct SearchRecord {
  int session_index = 0;
  int target_id = 0;
  SearchDirection direction = SearchDirection::Backward;
  bool found = false;
  FrameRef ref;
};

void write_search_records(const std::string& path, const std::vector<SearchRecord>& records);

void write_remap_outcomes(const std::string& path, const std::vector<RemapOutcome>& outcomes);

void write_keyvalues(const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& rows);

std::string format_metrics(const MetricsReport& report);
void write_metrics(const std::string& path, const MetricsReport& report);
std::map<std::string, std::string> read_keyvalues(const std::string& path);

}  // namespace courtmot
