#include "courtmot/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace courtmot {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double as_double(const std::string& key, const std::string& val) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(val, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + ": expected a number, got '" + val + "'");
  }
  if (used != val.size() || !std::isfinite(v))
    throw ConfigError("config: " + key + ": expected a number, got '" + val + "'");
  return v;
}

int as_int(const std::string& key, const std::string& val) {
  size_t used = 0;
  long v = 0;
  try {
    v = std::stol(val, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + ": expected an integer, got '" + val + "'");
  }
  if (used != val.size())
    throw ConfigError("config: " + key + ": expected an integer, got '" + val + "'");
  return static_cast<int>(v);
}

std::uint64_t as_u64(const std::string& key, const std::string& val) {
  size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(val, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + ": expected a non-negative integer, got '" + val + "'");
  }
  if (used != val.size())
    throw ConfigError("config: " + key + ": expected a non-negative integer, got '" + val + "'");
  return v;
}

bool as_bool(const std::string& key, const std::string& val) {
  if (val == "true" || val == "1" || val == "yes" || val == "on") return true;
  if (val == "false" || val == "0" || val == "no" || val == "off") return false;
  throw ConfigError("config: " + key + ": expected a boolean, got '" + val + "'");
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::vector<CrossingEvent> parse_crossings(const std::string& key, const std::string& val) {
  std::vector<CrossingEvent> out;
  if (val == "-" || val.empty()) return out;
  std::istringstream is(val);
  std::string item;
  while (std::getline(is, item, ';')) {
    std::istringstream fields(item);
    std::string t, a, b, extra;
    if (!std::getline(fields, t, ':') || !std::getline(fields, a, ':') ||
        !std::getline(fields, b, ':') || std::getline(fields, extra, ':'))
      throw ConfigError("config: " + key + ": expected 'time:a:b' entries separated by ';'");
    CrossingEvent ev;
    ev.time_s = as_double(key, trim(t));
    ev.a = as_int(key, trim(a));
    ev.b = as_int(key, trim(b));
    out.push_back(ev);
  }
  return out;
}

std::string crossings_str(const std::vector<CrossingEvent>& crossings) {
  if (crossings.empty()) return "-";
  std::string s;
  for (size_t i = 0; i < crossings.size(); ++i) {
    if (i) s += ';';
    s += g17(crossings[i].time_s) + ":" + std::to_string(crossings[i].a) + ":" +
         std::to_string(crossings[i].b);
  }
  return s;
}

struct Binding {
  std::function<void(PipelineConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

#define NUM_FIELD(expr)                                                                  \
  Binding {                                                                              \
    [](PipelineConfig& c, const std::string& k, const std::string& v) {                  \
      c.expr = as_double(k, v);                                                          \
    },                                                                                   \
        [](const PipelineConfig& c) { return g17(c.expr); }                              \
  }
#define INT_FIELD(expr)                                                                  \
  Binding {                                                                              \
    [](PipelineConfig& c, const std::string& k, const std::string& v) {                  \
      c.expr = as_int(k, v);                                                             \
    },                                                                                   \
        [](const PipelineConfig& c) { return std::to_string(c.expr); }                   \
  }
#define BOOL_FIELD(expr)                                                                 \
  Binding {                                                                              \
    [](PipelineConfig& c, const std::string& k, const std::string& v) {                  \
      c.expr = as_bool(k, v);                                                            \
    },                                                                                   \
        [](const PipelineConfig& c) { return bool_str(c.expr); }                         \
  }

const std::map<std::string, Binding>& bindings() {
  static const std::map<std::string, Binding> table = {
      {"seed",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) {
          c.scenario.seed = as_u64(k, v);
        },
        [](const PipelineConfig& c) { return std::to_string(c.scenario.seed); }}},
      {"scenario.player_count", INT_FIELD(scenario.player_count)},
      {"scenario.duration_s", NUM_FIELD(scenario.duration_s)},
      {"scenario.frame_rate", NUM_FIELD(scenario.frame_rate)},
      {"scenario.court_width", NUM_FIELD(scenario.court_width)},
      {"scenario.court_height", NUM_FIELD(scenario.court_height)},
      {"scenario.body_radius", NUM_FIELD(scenario.body_radius)},
      {"scenario.body_height", NUM_FIELD(scenario.body_height)},
      {"scenario.crossings",
       {[](PipelineConfig& c, const std::string& k, const std::string& v) {
          c.scenario.crossings = parse_crossings(k, v);
        },
        [](const PipelineConfig& c) { return crossings_str(c.scenario.crossings); }}},
      {"motion.max_speed", NUM_FIELD(scenario.motion.max_speed)},
      {"motion.steer_gain", NUM_FIELD(scenario.motion.steer_gain)},
      {"motion.repulsion_radius", NUM_FIELD(scenario.motion.repulsion_radius)},
      {"motion.repulsion_gain", NUM_FIELD(scenario.motion.repulsion_gain)},
      {"motion.waypoint_tolerance", NUM_FIELD(scenario.motion.waypoint_tolerance)},
      {"motion.crossing_window_s", NUM_FIELD(scenario.motion.crossing_window_s)},
      {"motion.crossing_prep_s", NUM_FIELD(scenario.motion.crossing_prep_s)},
      {"lidar.az_fov_deg", NUM_FIELD(scenario.lidar.az_fov_deg)},
      {"lidar.el_fov_deg", NUM_FIELD(scenario.lidar.el_fov_deg)},
      {"lidar.az_res_deg", NUM_FIELD(scenario.lidar.az_res_deg)},
      {"lidar.el_res_deg", NUM_FIELD(scenario.lidar.el_res_deg)},
      {"lidar.max_range", NUM_FIELD(scenario.lidar.max_range)},
      {"lidar.noise_sigma", NUM_FIELD(scenario.lidar.noise_sigma)},
      {"camera.width", INT_FIELD(scenario.camera.width)},
      {"camera.height", INT_FIELD(scenario.camera.height)},
      {"camera.hfov_deg", NUM_FIELD(scenario.camera.hfov_deg)},
      {"camera.vfov_deg", NUM_FIELD(scenario.camera.vfov_deg)},
      {"bev.origin_x", NUM_FIELD(grid.origin_x)},
      {"bev.origin_y", NUM_FIELD(grid.origin_y)},
      {"bev.resolution", NUM_FIELD(grid.resolution)},
      {"bev.width", INT_FIELD(grid.width)},
      {"bev.height", INT_FIELD(grid.height)},
      {"bev.z_min", NUM_FIELD(bev_z_min)},
      {"bev.z_max", NUM_FIELD(bev_z_max)},
      {"region.margin", NUM_FIELD(region_margin)},
      {"detector.position_sigma", NUM_FIELD(detector.position_sigma)},
      {"detector.size_jitter", NUM_FIELD(detector.size_jitter)},
      {"detector.miss_rate", NUM_FIELD(detector.miss_rate)},
      {"detector.fp_rate", NUM_FIELD(detector.fp_rate)},
      {"detector.merge_distance", NUM_FIELD(detector.merge_distance)},
      {"detector.merged_confidence", NUM_FIELD(detector.merged_confidence)},
      {"detector.clean_confidence", NUM_FIELD(detector.clean_confidence)},
      {"detector.suppress_iou", NUM_FIELD(suppress_iou)},
      {"tracker.high_conf_threshold", NUM_FIELD(tracker.high_conf_threshold)},
      {"tracker.low_conf_threshold", NUM_FIELD(tracker.low_conf_threshold)},
      {"tracker.match_threshold_stage1", NUM_FIELD(tracker.match_threshold_stage1)},
      {"tracker.match_threshold_stage2", NUM_FIELD(tracker.match_threshold_stage2)},
      {"tracker.max_lost_frames", INT_FIELD(tracker.max_lost_frames)},
      {"tracker.min_hits_to_activate", INT_FIELD(tracker.min_hits_to_activate)},
      {"tracker.size_smoothing", NUM_FIELD(tracker.size_smoothing)},
      {"tracker.pos_noise_weight", NUM_FIELD(tracker.pos_noise_weight)},
      {"tracker.vel_noise_weight", NUM_FIELD(tracker.vel_noise_weight)},
      {"tracker.meas_noise_weight", NUM_FIELD(tracker.meas_noise_weight)},
      {"occlusion.neighbor_radius", NUM_FIELD(neighbor_radius)},
      {"search.tau_high", NUM_FIELD(search.tau_high)},
      {"search.tau_low", NUM_FIELD(search.tau_low)},
      {"search.max_frames", INT_FIELD(search.max_search_frames)},
      {"search.z_min", NUM_FIELD(search.z_min)},
      {"search.z_max", NUM_FIELD(search.z_max)},
      {"camera_detector.sigma_px", NUM_FIELD(camera_detector.sigma_px)},
      {"camera_detector.miss_rate", NUM_FIELD(camera_detector.miss_rate)},
      {"camera_detector.fp_rate", NUM_FIELD(camera_detector.fp_rate)},
      {"camera_detector.merge_iou", NUM_FIELD(camera_detector.merge_iou)},
      {"camera_detector.merged_confidence", NUM_FIELD(camera_detector.merged_confidence)},
      {"camera_detector.clean_confidence", NUM_FIELD(camera_detector.clean_confidence)},
      {"embedding.dim", INT_FIELD(embedding.dim)},
      {"embedding.base_sigma", NUM_FIELD(embedding.base_sigma)},
      {"embedding.occlusion_noise_scale", NUM_FIELD(embedding.occlusion_noise_scale)},
      {"embedding.orthogonal", BOOL_FIELD(embedding.orthogonal_anchors)},
      {"reid.min_cosine", NUM_FIELD(reid_min_cosine)},
      {"metrics.distance_threshold", NUM_FIELD(metrics.distance_threshold)},
      {"metrics.hota_sweep", BOOL_FIELD(metrics.hota_sweep)},
  };
  return table;
}

#undef NUM_FIELD
#undef INT_FIELD
#undef BOOL_FIELD

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError("config: " + message);
}

void validate(const PipelineConfig& c) {
  c.grid.validate();
  check(c.bev_z_max > c.bev_z_min, "bev.z_max must exceed bev.z_min");
  check(c.region_margin >= 0.0, "region.margin must be non-negative");
  check(c.detector.miss_rate >= 0.0 && c.detector.miss_rate < 1.0,
        "detector.miss_rate must be in [0, 1)");
  check(c.detector.fp_rate >= 0.0, "detector.fp_rate must be non-negative");
  check(c.suppress_iou >= 0.0 && c.suppress_iou <= 1.0,
        "detector.suppress_iou must be in [0, 1]");
  check(c.tracker.high_conf_threshold >= c.tracker.low_conf_threshold,
        "tracker.high_conf_threshold must be at least tracker.low_conf_threshold");
  check(c.tracker.match_threshold_stage1 > 0.0 && c.tracker.match_threshold_stage2 > 0.0,
        "tracker match thresholds must be positive");
  check(c.tracker.max_lost_frames >= 0, "tracker.max_lost_frames must be non-negative");
  check(c.tracker.min_hits_to_activate >= 1, "tracker.min_hits_to_activate must be positive");
  check(c.tracker.size_smoothing > 0.0 && c.tracker.size_smoothing <= 1.0,
        "tracker.size_smoothing must be in (0, 1]");
  check(c.neighbor_radius > 0.0, "occlusion.neighbor_radius must be positive");
  check(c.search.tau_high > c.search.tau_low && c.search.tau_low > 0.0 &&
            c.search.tau_high <= 1.0,
        "search thresholds must satisfy 0 < tau_low < tau_high <= 1");
  check(c.search.max_search_frames >= 1, "search.max_frames must be positive");
  check(c.search.z_max > c.search.z_min, "search.z_max must exceed search.z_min");
  check(c.embedding.dim >= 2, "embedding.dim must be at least 2");
  check(c.embedding.base_sigma >= 0.0, "embedding.base_sigma must be non-negative");
  check(c.reid_min_cosine <= 1.0, "reid.min_cosine cannot exceed 1");
}

}  // namespace

ConfigMap parse_config(const std::string& text, const std::string& origin) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(ln) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(ln) + ": empty key");
    map[key] = val;
  }
  return map;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

void merge_config(ConfigMap& base, const ConfigMap& overlay) {
  for (const auto& [k, v] : overlay) base[k] = v;
}

void apply_override(ConfigMap& base, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  base[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

PipelineConfig pipeline_config_from(const ConfigMap& map) {
  PipelineConfig cfg;
  const auto& table = bindings();
  for (const auto& [key, val] : map) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second.set(cfg, key, val);
  }
  validate(cfg);
  return cfg;
}

ConfigMap config_to_map(const PipelineConfig& cfg) {
  ConfigMap out;
  for (const auto& [key, binding] : bindings()) out[key] = binding.get(cfg);
  return out;
}

std::string serialize_config(const ConfigMap& map) {
  std::string s;
  for (const auto& [k, v] : map) s += k + " = " + v + "\n";
  return s;
}

CourtRegion court_region(const PipelineConfig& cfg) {
  const double m = cfg.region_margin;
  return CourtRegion::rectangle(-m, -m, cfg.scenario.court_width + m,
                                cfg.scenario.court_height + m, cfg.bev_z_min, cfg.bev_z_max);
}

void write_calibration(const std::string& path, const std::vector<Rig>& rigs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "rigs = " << rigs.size() << "\n";
  for (size_t i = 0; i < rigs.size(); ++i) {
    const std::string p = "rig" + std::to_string(i) + ".";
    auto emit = [&](const std::string& key, const RigidTransform& t) {
      out << p << key << ".rotation =";
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out << ' ' << g17(t.rotation()(r, c));
      out << "\n" << p << key << ".translation =";
      for (int r = 0; r < 3; ++r) out << ' ' << g17(t.translation()(r));
      out << "\n";
    };
    emit("lidar", rigs[i].lidar_to_world);
    const CameraModel& cam = rigs[i].camera;
    out << p << "camera.fx = " << g17(cam.fx) << "\n";
    out << p << "camera.fy = " << g17(cam.fy) << "\n";
    out << p << "camera.cx = " << g17(cam.cx) << "\n";
    out << p << "camera.cy = " << g17(cam.cy) << "\n";
    out << p << "camera.width = " << cam.width << "\n";
    out << p << "camera.height = " << cam.height << "\n";
    emit("camera.pose", cam.world_to_camera);
  }
}

std::vector<Rig> read_calibration(const std::string& path) {
  const ConfigMap map = read_config_file(path);
  const auto get = [&](const std::string& key) -> const std::string& {
    const auto it = map.find(key);
    if (it == map.end()) throw DataError(path + ": missing key '" + key + "'");
    return it->second;
  };
  const int n = as_int("rigs", get("rigs"));
  if (n < 1) throw DataError(path + ": rigs must be positive");

  auto parse_transform = [&](const std::string& base) {
    const auto nums = [&](const std::string& key, int count) {
      std::istringstream is(get(key));
      std::vector<double> v;
      double x;
      while (is >> x) v.push_back(x);
      if (static_cast<int>(v.size()) != count)
        throw DataError(path + ": " + key + ": expected " + std::to_string(count) +
                        " numbers");
      return v;
    };
    const auto r = nums(base + ".rotation", 9);
    const auto t = nums(base + ".translation", 3);
    Eigen::Matrix3d rot;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) rot(i, j) = r[i * 3 + j];
    return RigidTransform(rot, Eigen::Vector3d(t[0], t[1], t[2]));
  };

  std::vector<Rig> rigs;
  for (int i = 0; i < n; ++i) {
    const std::string p = "rig" + std::to_string(i) + ".";
    Rig rig;
    rig.lidar_to_world = parse_transform(p + "lidar");
    rig.camera.fx = as_double(p + "camera.fx", get(p + "camera.fx"));
    rig.camera.fy = as_double(p + "camera.fy", get(p + "camera.fy"));
    rig.camera.cx = as_double(p + "camera.cx", get(p + "camera.cx"));
    rig.camera.cy = as_double(p + "camera.cy", get(p + "camera.cy"));
    rig.camera.width = as_int(p + "camera.width", get(p + "camera.width"));
    rig.camera.height = as_int(p + "camera.height", get(p + "camera.height"));
    rig.camera.world_to_camera = parse_transform(p + "camera.pose");
    rig.camera.validate();
    rigs.push_back(rig);
  }
  return rigs;
}

}  // namespace courtmot
