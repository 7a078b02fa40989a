// End-to-end acceptance checks, one printed line per criterion. Exit code is
// the number of failed criteria, so the harness sees partial failures.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "courtmot/pipeline.hpp"
#include "oracles.hpp"

using namespace courtmot;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt1(double v) { return fmt_double(v, 1); }

// ---------------------------------------------------------------------------
// C1: session extraction against a direct two-state scan.

Outcome c1_extractor_oracle() {
  const auto t0 = Clock::now();
  Rng rng(20260822);
  for (int it = 0; it < 10000; ++it) {
    const int len = rng.uniform_int(0, 200);
    IdCountSeries series;
    std::set<int> pool;
    for (int t = 0; t < len; ++t) {
      for (int id = 1; id <= 12; ++id)
        if (rng.uniform() < 0.12) {
          if (pool.count(id))
            pool.erase(id);
          else
            pool.insert(id);
        }
      series.frames.emplace_back(pool.begin(), pool.end());
    }

    const auto got = extract_sessions(series);
    const auto want = oracle::sessions(series);
    bool same = got.size() == want.size();
    for (size_t i = 0; same && i < got.size(); ++i)
      same = got[i].index == static_cast<int>(i) + 1 && got[i].t_start == want[i].t_start &&
             got[i].t_end == want[i].t_end && got[i].n_ref == want[i].n_ref &&
             got[i].lost_ids == want[i].lost && got[i].gain_ids == want[i].gain &&
             got[i].open == want[i].open;
    if (!same)
      return {false, "series " + std::to_string(it) + " disagrees with the reference scan"};
  }
  const double el = seconds_since(t0);
  return {el < 10.0,
          "10000 random series match the two-state reference (" + fmt1(el) + "s)"};
}

// ---------------------------------------------------------------------------
// C2: association and frame matching against exhaustive enumeration.

double gate_cost(const PlaneBox& a, const PlaneBox& b) {
  const Rect ra = a.rect(), rb = b.rect();
  if (ra.degenerate() || rb.degenerate()) return 1e18;
  return 1.0 - iou(ra, rb);
}

// Best (matches, cost) over all injective pairings with cost <= gate.
void enumerate_stage(const std::vector<PlaneBox>& tracks, const std::vector<PlaneBox>& dets,
                     double gate, size_t di, std::vector<bool>& used, int count, double cost,
                     int& best_count, double& best_cost) {
  if (di == dets.size()) {
    if (count > best_count || (count == best_count && cost < best_cost - 1e-12)) {
      best_count = count;
      best_cost = cost;
    }
    return;
  }
  enumerate_stage(tracks, dets, gate, di + 1, used, count, cost, best_count, best_cost);
  for (size_t ti = 0; ti < tracks.size(); ++ti) {
    if (used[ti]) continue;
    const double c = gate_cost(tracks[ti], dets[di]);
    if (c > gate) continue;
    used[ti] = true;
    enumerate_stage(tracks, dets, gate, di + 1, used, count + 1, cost + c, best_count,
                    best_cost);
    used[ti] = false;
  }
}

std::pair<int, double> brute_stage(const std::vector<PlaneBox>& tracks,
                                   const std::vector<PlaneBox>& dets, double gate) {
  int best_count = -1;
  double best_cost = 0.0;
  std::vector<bool> used(tracks.size(), false);
  enumerate_stage(tracks, dets, gate, 0, used, 0, 0.0, best_count, best_cost);
  return {best_count, best_cost};
}

void enumerate_points(const std::vector<std::vector<double>>& dist, double thr, size_t gi,
                      std::vector<bool>& used, int count, double total, int& best_count,
                      double& best_total) {
  if (gi == dist.size()) {
    if (count > best_count || (count == best_count && total < best_total - 1e-12)) {
      best_count = count;
      best_total = total;
    }
    return;
  }
  enumerate_points(dist, thr, gi + 1, used, count, total, best_count, best_total);
  for (size_t pi = 0; pi < used.size(); ++pi) {
    if (used[pi] || dist[gi][pi] > thr) continue;
    used[pi] = true;
    enumerate_points(dist, thr, gi + 1, used, count + 1, total + dist[gi][pi], best_count,
                     best_total);
    used[pi] = false;
  }
}

Outcome c2_assignment_optimality() {
  const auto t0 = Clock::now();
  Rng rng(424242);
  const TrackerConfig cfg;

  auto random_box = [&rng]() {
    return PlaneBox{rng.uniform(0.0, 6.0), rng.uniform(0.0, 6.0), rng.uniform(0.4, 1.8),
                    rng.uniform(0.4, 1.8)};
  };

  for (int it = 0; it < 1000; ++it) {
    // Two-stage association.
    const int nt = rng.uniform_int(0, 6);
    const int nd = rng.uniform_int(0, 6);
    std::vector<TrackState> tracks(nt);
    std::vector<PlaneBox> track_boxes;
    for (int i = 0; i < nt; ++i) {
      const PlaneBox b = random_box();
      tracks[i].id = i + 1;
      tracks[i].mean << b.cx, b.cy, b.w, b.h, 0.0, 0.0;
      tracks[i].status = TrackStatus::Active;
      track_boxes.push_back(b);
    }
    std::vector<Measurement> dets(nd);
    std::vector<PlaneBox> high_boxes, low_boxes;
    for (int j = 0; j < nd; ++j) {
      dets[j].box = random_box();
      dets[j].confidence = rng.uniform(0.0, 1.0);
      if (dets[j].confidence >= cfg.high_conf_threshold)
        high_boxes.push_back(dets[j].box);
      else if (dets[j].confidence >= cfg.low_conf_threshold)
        low_boxes.push_back(dets[j].box);
    }

    const Association assoc = associate(tracks, dets, cfg);
    int got_high = 0, got_low = 0;
    double got_high_cost = 0.0, got_low_cost = 0.0;
    std::set<int> matched_tracks;
    for (const auto& [ti, dj] : assoc.matches) {
      const double c = gate_cost(track_boxes[ti], dets[dj].box);
      matched_tracks.insert(ti);
      if (dets[dj].confidence >= cfg.high_conf_threshold) {
        ++got_high;
        got_high_cost += c;
      } else {
        ++got_low;
        got_low_cost += c;
      }
    }
    const auto [want_high, want_high_cost] =
        brute_stage(track_boxes, high_boxes, cfg.match_threshold_stage1);
    if (got_high != want_high || std::abs(got_high_cost - want_high_cost) > 1e-9)
      return {false, "association stage 1 suboptimal on instance " + std::to_string(it)};

    // Stage 2 runs over whatever stage 1 left unmatched.
    std::vector<PlaneBox> leftover;
    for (int i = 0; i < nt; ++i)
      if (!matched_tracks.count(i) ||
          std::none_of(assoc.matches.begin(), assoc.matches.end(),
                       [&](const std::pair<int, int>& m) {
                         return m.first == i &&
                                dets[m.second].confidence >= cfg.high_conf_threshold;
                       }))
        leftover.push_back(track_boxes[i]);
    const auto [want_low, want_low_cost] =
        brute_stage(leftover, low_boxes, cfg.match_threshold_stage2);
    if (got_low != want_low || std::abs(got_low_cost - want_low_cost) > 1e-9)
      return {false, "association stage 2 suboptimal on instance " + std::to_string(it)};

    // Point matching for the metrics.
    const int ng = rng.uniform_int(0, 6);
    const int np = rng.uniform_int(0, 6);
    std::vector<std::vector<double>> dist(ng, std::vector<double>(np));
    for (auto& row : dist)
      for (double& d : row) d = rng.uniform(0.0, 2.0);
    const double thr = rng.uniform(0.3, 1.5);
    const PointMatchResult pm = match_points(dist, thr);
    double pm_total = 0.0;
    for (int g = 0; g < ng; ++g)
      if (pm.gt_to_pred[g] >= 0) pm_total += dist[g][pm.gt_to_pred[g]];
    int best_count = -1;
    double best_total = 0.0;
    std::vector<bool> used(np, false);
    enumerate_points(dist, thr, 0, used, 0, 0.0, best_count, best_total);
    if (pm.matched != best_count || std::abs(pm_total - best_total) > 1e-9)
      return {false, "point matching suboptimal on instance " + std::to_string(it)};
  }
  const double el = seconds_since(t0);
  return {el < 10.0,
          "1000 association and 1000 matching instances equal enumeration (" + fmt1(el) +
              "s)"};
}

// ---------------------------------------------------------------------------
// C3: noiseless five-player scene tracks perfectly.

PipelineConfig noiseless_config() {
  PipelineConfig cfg = pipeline_config_from({});
  cfg.detector.position_sigma = 0.0;
  cfg.detector.size_jitter = 0.0;
  cfg.detector.miss_rate = 0.0;
  cfg.detector.fp_rate = 0.0;
  cfg.detector.merge_distance = 0.0;
  return cfg;
}

Outcome c3_noiseless_perfect() {
  PipelineConfig cfg = noiseless_config();
  cfg.scenario.player_count = 5;
  cfg.scenario.duration_s = 10.0;
  cfg.scenario.motion.max_speed = 1.5;
  cfg.scenario.seed = 3;
  const Scenario sc = generate_scenario(cfg.scenario);

  OracleBevDetector detector(sc.gt, cfg.grid, cfg.detector,
                             mix_seed(cfg.scenario.seed, seed_tag::detector));
  LidarFrameProvider provider;
  provider.frame_count = sc.frame_count;
  const TrackingRunResult run = run_detection_tracking(provider, detector, cfg);
  const MetricsReport m = evaluate_sequence(sc.gt, run.tracks);

  const bool pass =
      m.mota == 1.0 && m.idf1 == 1.0 && m.hota == 1.0 && m.idsw == 0;
  std::ostringstream detail;
  detail << "mota=" << fmt_double(m.mota, 6) << " idf1=" << fmt_double(m.idf1, 6)
         << " hota=" << fmt_double(m.hota, 6) << " switches=" << m.idsw << " over "
         << sc.frame_count << " frames";
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// C4 + C5 share one 20-scenario suite run.

Outcome c4_fusion_recovers(const SuiteResult& suite) {
  const bool pass = suite.rid_wins >= 19 && suite.mean_idf1_gain >= 0.02 &&
                    suite.elapsed_s < 300.0;
  std::ostringstream detail;
  detail << "recovery wins " << suite.rid_wins << "/20, mean idf1 gain "
         << fmt_double(suite.mean_idf1_gain, 4) << " (" << fmt1(suite.elapsed_s) << "s)";
  return {pass, detail.str()};
}

Outcome c5_detection_untouched(const SuiteResult& suite) {
  for (size_t i = 0; i < suite.rows.size(); ++i)
    if (suite.rows[i].fusion.det_a != suite.rows[i].lidar.det_a)
      return {false, "DetA diverged on scenario " + std::to_string(i)};
  return {true, "DetA identical bit-for-bit on all " + std::to_string(suite.rows.size()) +
                    " scenarios"};
}

// ---------------------------------------------------------------------------
// C6: throughput on a dense ten-player cloud scene.

Outcome c6_throughput() {
  PipelineConfig cfg = noiseless_config();
  cfg.scenario.player_count = 10;
  cfg.scenario.duration_s = 10.0;
  cfg.scenario.seed = 9;
  cfg.scenario.lidar.az_res_deg = 0.28;
  cfg.scenario.lidar.el_res_deg = 0.42;
  const Scenario sc = generate_scenario(cfg.scenario);

  OracleBevDetector detector(sc.gt, cfg.grid, cfg.detector,
                             mix_seed(cfg.scenario.seed, seed_tag::detector));
  LidarFrameProvider provider;
  provider.frame_count = sc.frame_count;
  for (const auto& rig : sc.rigs) provider.sensor_to_world.push_back(rig.lidar_to_world);
  provider.clouds = [&sc](int frame) {
    std::vector<PointCloud> out;
    for (int r = 0; r < static_cast<int>(sc.rigs.size()); ++r)
      out.push_back(sample_lidar(sc, r, frame));
    return out;
  };

  const TrackingRunResult run = run_detection_tracking(provider, detector, cfg);
  const double fps = run.timing.frames_per_second();
  const double pts =
      static_cast<double>(run.timing.total_points) / std::max(1, run.timing.frames);

  const auto rows = timing_rows(run.timing);
  const std::map<std::string, std::string> by_name(rows.begin(), rows.end());
  const bool split_present = by_name.count("merge_filter_ms") && by_name.count("rasterize_ms") &&
                             by_name.count("detect_ms") && by_name.count("track_ms") &&
                             by_name.count("fusion_ms") &&
                             by_name.count("total_ms_per_frame") &&
                             by_name.count("frames_per_second");

  const bool pass = fps >= 100.0 && pts >= 40000.0 && pts <= 60000.0 && split_present;
  std::ostringstream detail;
  detail << fmt1(fps) << " fps at " << static_cast<long>(pts) << " points/frame over "
         << run.timing.frames << " frames, stage split "
         << (split_present ? "present" : "missing");
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// C7: randomized geometry invariants.

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) {
                          return a.x() == b.x() && a.y() == b.y();
                        }),
            pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool inside_hull(const std::vector<Eigen::Vector2d>& hull, const Eigen::Vector2d& p,
                 double eps) {
  if (hull.size() < 3) {
    for (const auto& h : hull)
      if ((h - p).norm() <= eps) return true;
    if (hull.size() == 2) {
      const Eigen::Vector2d d = hull[1] - hull[0];
      const double t = std::clamp((p - hull[0]).dot(d) / d.squaredNorm(), 0.0, 1.0);
      return (hull[0] + t * d - p).norm() <= eps;
    }
    return false;
  }
  for (size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    const double cross = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
    if (cross < -eps) return false;
  }
  return true;
}

Outcome c7_geometry_invariants() {
  const auto t0 = Clock::now();
  Rng rng(20240707);
  for (int it = 0; it < 1000; ++it) {
    // Rigid transform round trip.
    Eigen::Vector3d axis(rng.gaussian(), rng.gaussian(), rng.gaussian());
    if (axis.norm() < 1e-6) axis = Eigen::Vector3d::UnitZ();
    axis.normalize();
    const Eigen::Matrix3d rot =
        Eigen::AngleAxisd(rng.uniform(0.0, 2.0 * M_PI), axis).toRotationMatrix();
    const Eigen::Vector3d trans(rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0),
                                rng.uniform(-50.0, 50.0));
    const RigidTransform t(rot, trans);
    const RigidTransform inv = t.inverse();
    for (int k = 0; k < 5; ++k) {
      const Eigen::Vector3d p(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0),
                              rng.uniform(-100.0, 100.0));
      if ((inv.apply(t.apply(p)) - p).cwiseAbs().maxCoeff() > 1e-9)
        return {false, "transform round trip drifted on case " + std::to_string(it)};
      if ((t.compose(inv).apply(p) - p).cwiseAbs().maxCoeff() > 1e-9)
        return {false, "compose with inverse is not identity on case " + std::to_string(it)};
    }

    // Rasterization conserves in-bounds points.
    BevGrid grid;
    grid.origin_x = rng.uniform(-10.0, 10.0);
    grid.origin_y = rng.uniform(-10.0, 10.0);
    grid.resolution = rng.uniform(0.02, 1.0);
    grid.width = rng.uniform_int(1, 120);
    grid.height = rng.uniform_int(1, 120);
    PointCloud cloud;
    const int n = rng.uniform_int(0, 400);
    const double span_x = grid.width * grid.resolution;
    const double span_y = grid.height * grid.resolution;
    std::uint64_t expected = 0;
    for (int k = 0; k < n; ++k) {
      const Eigen::Vector3d p(grid.origin_x + rng.uniform(-0.5, 1.5) * span_x,
                              grid.origin_y + rng.uniform(-0.5, 1.5) * span_y,
                              rng.uniform(-1.0, 3.0));
      cloud.points.push_back(p);
      const auto [cx, cy] = grid.world_to_cell(p.x(), p.y());
      if (grid.in_bounds(cx, cy)) ++expected;
    }
    const BevImage img = rasterize_bev(cloud, grid);
    if (img.total() != expected)
      return {false, "raster count mismatch on case " + std::to_string(it)};

    // Projection of a box stays inside the hull of its projected corners.
    CameraModel cam;
    cam.fx = rng.uniform(300.0, 2000.0);
    cam.fy = rng.uniform(300.0, 2000.0);
    cam.width = 2000;
    cam.height = 2000;
    cam.cx = rng.uniform(800.0, 1200.0);
    cam.cy = rng.uniform(800.0, 1200.0);
    const double x0 = rng.uniform(-3.0, 2.0), y0 = rng.uniform(-3.0, 2.0);
    const Rect foot{x0, y0, x0 + rng.uniform(0.1, 3.0), y0 + rng.uniform(0.1, 3.0)};
    const double z0 = rng.uniform(1.0, 15.0);
    const Voxel3D voxel = voxel_from_rect(foot, z0, z0 + rng.uniform(0.1, 4.0));
    const auto proj = project(voxel, cam);
    if (!proj) return {false, "front-of-camera voxel failed to project, case " + std::to_string(it)};

    std::vector<Eigen::Vector2d> corners(proj->corners.begin(), proj->corners.end());
    const auto hull = convex_hull(corners);
    double scale = 1.0;
    for (const auto& c : corners) scale = std::max({scale, std::abs(c.x()), std::abs(c.y())});
    const double eps = 1e-9 * scale;
    for (int s = 0; s < 100; ++s) {
      const Eigen::Vector3d q(rng.uniform(foot.x0, foot.x1), rng.uniform(foot.y0, foot.y1),
                              rng.uniform(z0, z0 + 0.1));
      const Eigen::Vector2d uv(cam.fx * q.x() / q.z() + cam.cx,
                               cam.fy * q.y() / q.z() + cam.cy);
      if (!inside_hull(hull, uv, eps))
        return {false, "interior sample escaped the corner hull on case " + std::to_string(it)};
      if (uv.x() < proj->unclamped.x0 - eps || uv.x() > proj->unclamped.x1 + eps ||
          uv.y() < proj->unclamped.y0 - eps || uv.y() > proj->unclamped.y1 + eps)
        return {false, "interior sample escaped the bounding box on case " + std::to_string(it)};
    }
  }
  const double el = seconds_since(t0);
  return {true, "1000 randomized transform/raster/projection cases hold (" + fmt1(el) + "s)"};
}

// ---------------------------------------------------------------------------
// C8: hand-computed metric golden cases, pinned at 1e-12.

Outcome c8_metric_goldens() {
  constexpr double kTol = 1e-12;
  auto put = [](SequenceTable& t, int frame, int id, double cx, double cy) {
    t.ensure_frame(frame);
    t.frame(frame).push_back({id, PlaneBox{cx, cy, 3.0, 4.0}});
  };

  // Mean diagonal 7.5 from one 3x4 and one 6x8 box.
  SequenceTable diag;
  diag.ensure_frame(2);
  diag.frame(1).push_back({1, PlaneBox{0, 0, 3, 4}});
  diag.frame(2).push_back({1, PlaneBox{9, 9, 6, 8}});
  if (std::abs(mean_gt_diagonal(diag) - 7.5) > kTol) return {false, "diagonal 7.5 case broke"};

  // MOTA 0.8: ten GT boxes, one miss, one ghost.
  SequenceTable gt_a, pred_a;
  for (int t = 1; t <= 10; ++t) put(gt_a, t, 1, 0, 0);
  for (int t = 1; t <= 9; ++t) put(pred_a, t, 7, 0, 0);
  put(pred_a, 1, 9, 50, 50);
  pred_a.ensure_frame(10);
  if (std::abs(evaluate_sequence(gt_a, pred_a).mota - 0.8) > kTol)
    return {false, "MOTA 0.8 case broke"};

  // IDF1 0.5: identity handed over halfway.
  SequenceTable pred_b;
  for (int t = 1; t <= 5; ++t) put(pred_b, t, 7, 0, 0);
  for (int t = 6; t <= 10; ++t) put(pred_b, t, 8, 0, 0);
  if (std::abs(evaluate_sequence(gt_a, pred_b).idf1 - 0.5) > kTol)
    return {false, "IDF1 0.5 case broke"};

  // R_ID 0.25: eight cease events, two resumed.
  SequenceTable gt_c, pred_c;
  for (int g = 1; g <= 4; ++g)
    for (int t = 1; t <= 20; ++t) put(gt_c, t, g, 10.0 * g, 0.0);
  for (int g = 1; g <= 4; ++g) {
    for (int t = 1; t <= 5; ++t) put(pred_c, t, g, 10.0 * g, 0.0);
    if (g <= 2) {
      for (int t = 6; t <= 10; ++t) put(pred_c, t, g + 10, 10.0 * g, 0.0);
      for (int t = 11; t <= 20; ++t) put(pred_c, t, g, 10.0 * g, 0.0);
    } else {
      for (int t = 6; t <= 15; ++t) put(pred_c, t, g + 10, 10.0 * g, 0.0);
    }
  }
  pred_c.ensure_frame(20);
  const MetricsReport rc = evaluate_sequence(gt_c, pred_c);
  if (rc.n_dis != 8 || rc.n_re != 2 || std::abs(rc.r_id - 0.25) > kTol)
    return {false, "R_ID 0.25 case broke"};

  return {true, "diagonal 7.5, MOTA 0.8, IDF1 0.5 and R_ID 0.25 all reproduce"};
}

// ---------------------------------------------------------------------------
// C9: byte-identical outputs for every subcommand.

int run_cmd(const std::string& cmd) { return std::system(cmd.c_str()); }

bool read_file(const fs::path& p, std::string& out) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return false;
  out.assign(std::istreambuf_iterator<char>(in), {});
  return true;
}

// Relative path -> content for every regular file, minus excluded names.
bool snapshot_dir(const fs::path& root, std::map<std::string, std::string>& out,
                  const std::set<std::string>& exclude) {
  out.clear();
  if (!fs::exists(root)) return false;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (exclude.count(name)) continue;
    std::string content;
    if (!read_file(entry.path(), content)) return false;
    out[fs::relative(entry.path(), root).string()] = std::move(content);
  }
  return true;
}

Outcome c9_determinism() {
  const char* bin = std::getenv("COURTMOT_BIN");
  if (!bin) return {false, "COURTMOT_BIN is not set"};
  const std::string base = std::string("\"") + bin + "\"";

  const fs::path root = fs::temp_directory_path() / "courtmot_acceptance";
  std::error_code ec;
  fs::remove_all(root, ec);
  fs::create_directories(root);

  const std::string sets =
      " --set seed=77 --set scenario.player_count=4 --set scenario.duration_s=3"
      " --set lidar.az_res_deg=0.6 --set lidar.el_res_deg=0.6";
  const std::set<std::string> exclude{"timing.txt"};
  const std::string quiet = " >/dev/null 2>&1";

  struct Step {
    std::string name;
    std::string cmd_a, cmd_b;
    fs::path out_a, out_b;
  };
  std::vector<Step> steps;

  const fs::path sim_a = root / "a" / "sim", sim_b = root / "b" / "sim";
  steps.push_back({"simulate",
                   base + " simulate --data " + sim_a.string() + " --clouds" + sets + quiet,
                   base + " simulate --data " + sim_b.string() + " --clouds" + sets + quiet,
                   sim_a, sim_b});

  const fs::path trk_a = root / "a" / "trk", trk_b = root / "b" / "trk";
  const std::string trk_cmd = base + " track --data " + sim_a.string() + sets + " --out ";
  steps.push_back({"track", trk_cmd + trk_a.string() + quiet, trk_cmd + trk_b.string() + quiet,
                   trk_a, trk_b});

  const fs::path fus_a = root / "a" / "fus", fus_b = root / "b" / "fus";
  const std::string fus_cmd =
      base + " track-fusion --data " + sim_a.string() + sets + " --out ";
  steps.push_back({"track-fusion", fus_cmd + fus_a.string() + quiet,
                   fus_cmd + fus_b.string() + quiet, fus_a, fus_b});

  const fs::path eval_a = root / "a" / "eval", eval_b = root / "b" / "eval";
  fs::create_directories(eval_a);
  fs::create_directories(eval_b);
  const std::string eval_cmd = base + " evaluate --gt " + (sim_a / "gt.txt").string() +
                               " --tracks " + (trk_a / "tracks.txt").string() + " --out ";
  steps.push_back({"evaluate", eval_cmd + (eval_a / "metrics.txt").string() + quiet,
                   eval_cmd + (eval_b / "metrics.txt").string() + quiet, eval_a, eval_b});

  const fs::path rep_a = root / "a" / "report", rep_b = root / "b" / "report";
  fs::create_directories(rep_a);
  fs::create_directories(rep_b);
  const std::string rep_cmd = base + " report --scenarios 2 --out ";
  steps.push_back({"report", rep_cmd + (rep_a / "report.txt").string() + quiet,
                   rep_cmd + (rep_b / "report.txt").string() + quiet, rep_a, rep_b});

  for (const auto& step : steps) {
    if (run_cmd(step.cmd_a) != 0 || run_cmd(step.cmd_b) != 0)
      return {false, step.name + " exited nonzero"};
    std::map<std::string, std::string> a, b;
    if (!snapshot_dir(step.out_a, a, exclude) || !snapshot_dir(step.out_b, b, exclude))
      return {false, step.name + " left no comparable output"};
    if (a.empty()) return {false, step.name + " produced no files"};
    if (a.size() != b.size()) return {false, step.name + " runs wrote different file sets"};
    for (const auto& [rel, content] : a) {
      const auto it = b.find(rel);
      if (it == b.end()) return {false, step.name + ": " + rel + " missing in second run"};
      if (it->second != content)
        return {false, step.name + ": " + rel + " differs between runs"};
    }
  }
  return {true, "simulate, track, track-fusion, evaluate and report all byte-identical"};
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&failures](const char* name, const Outcome& o) {
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << "\n";
    std::cout.flush();
    if (!o.pass) ++failures;
  };

  report("C1 occlusion extractor equivalence", c1_extractor_oracle());
  report("C2 assignment optimality", c2_assignment_optimality());
  report("C3 noiseless end-to-end", c3_noiseless_perfect());

  PipelineConfig suite_base = pipeline_config_from({});
  suite_base.scenario.seed = 1000;
  const SuiteResult suite = run_fusion_suite(suite_base, 20);
  report("C4 fusion repairs occlusions", c4_fusion_recovers(suite));
  report("C5 fusion never degrades detection", c5_detection_untouched(suite));

  report("C6 throughput sanity", c6_throughput());
  report("C7 geometry invariants", c7_geometry_invariants());
  report("C8 metrics golden micro-cases", c8_metric_goldens());
  report("C9 subcommand determinism", c9_determinism());

  return failures;
}
