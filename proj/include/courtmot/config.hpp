#pragma once

#include <map>
#include <string>
#include <vector>

#include "courtmot/detection.hpp"
#include "courtmot/geometry.hpp"
#include "courtmot/matching.hpp"
#include "courtmot/metrics.hpp"
#include "courtmot/simulator.hpp"
#include "courtmot/tracker.hpp"

namespace courtmot {

// Flat text config: one "key = value" per line, '#' starts a comment.
// Dotted keys group related settings; later files and --set flags override
// earlier values key by key.

using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(const std::string& text, const std::string& origin);
ConfigMap read_config_file(const std::string& path);
void merge_config(ConfigMap& base, const ConfigMap& overlay);

// "key=value" as given on the command line.
void apply_override(ConfigMap& base, const std::string& assignment);

struct PipelineConfig {
  ScenarioConfig scenario;
  BevGrid grid{-1.0, -1.0, 0.05, 600, 340};
  double bev_z_min = 0.2;
  double bev_z_max = 2.3;
  double region_margin = 0.5;  // court rectangle grown on every side
  OracleNoiseModel detector;
  double suppress_iou = 0.0;  // 0 disables duplicate suppression
  TrackerConfig tracker;
  double neighbor_radius = 1.5;
  SearchConfig search;
  CameraNoiseModel camera_detector;
  EmbeddingModel embedding;
  double reid_min_cosine = 0.2;
  MetricsConfig metrics;
};

// Unknown keys and malformed values raise ConfigError naming the key.
PipelineConfig pipeline_config_from(const ConfigMap& map);
ConfigMap config_to_map(const PipelineConfig& cfg);
std::string serialize_config(const ConfigMap& map);

CourtRegion court_region(const PipelineConfig& cfg);

// Sensor poses and intrinsics, stored in the same key = value format.
void write_calibration(const std::string& path, const std::vector<Rig>& rigs);
std::vector<Rig> read_calibration(const std::string& path);

}  // namespace courtmot
