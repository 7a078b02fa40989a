#include "courtmot/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace courtmot {

namespace {

constexpr double kDeg = M_PI / 180.0;

Eigen::Matrix3d look_rotation(const Eigen::Vector3d& forward_in) {
  const Eigen::Vector3d f = forward_in.normalized();
  const Eigen::Vector3d up(0.0, 0.0, 1.0);
  Eigen::Vector3d left = up.cross(f);
  if (left.norm() < 1e-9) left = Eigen::Vector3d(0.0, 1.0, 0.0);
  left.normalize();
  const Eigen::Vector3d z = f.cross(left);
  Eigen::Matrix3d r;  // columns: sensor x (forward), y (left), z (up)
  r.col(0) = f;
  r.col(1) = left;
  r.col(2) = z;
  return r;
}

CameraModel make_camera(const Eigen::Vector3d& pos, const Eigen::Vector3d& target,
                        const CameraSpec& spec) {
  CameraModel cam;
  cam.width = spec.width;
  cam.height = spec.height;
  cam.fx = (spec.width / 2.0) / std::tan(spec.hfov_deg / 2.0 * kDeg);
  cam.fy = (spec.height / 2.0) / std::tan(spec.vfov_deg / 2.0 * kDeg);
  cam.cx = spec.width / 2.0;
  cam.cy = spec.height / 2.0;

  const Eigen::Vector3d f = (target - pos).normalized();
  const Eigen::Vector3d up(0.0, 0.0, 1.0);
  Eigen::Vector3d right = f.cross(up);
  if (right.norm() < 1e-9) right = Eigen::Vector3d(1.0, 0.0, 0.0);
  right.normalize();
  const Eigen::Vector3d down = f.cross(right);
  Eigen::Matrix3d r;  // rows: camera x (right), y (down), z (forward)
  r.row(0) = right;
  r.row(1) = down;
  r.row(2) = f;
  cam.world_to_camera = RigidTransform(r, -(r * pos));
  cam.validate();
  return cam;
}

struct Vec2 {
  double x = 0.0, y = 0.0;
};

double dist(const Vec2& a, const Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

std::vector<Rig> default_rigs(const ScenarioConfig& cfg) {
  const double w = cfg.court_width, h = cfg.court_height;
  const Eigen::Vector3d center(w / 2.0, h / 2.0, 1.0);
  const std::vector<Eigen::Vector3d> positions = {
      {w / 2.0, -2.0, 2.0}, {w / 2.0, h + 2.0, 2.0}, {-2.0, -2.0, 2.0}};
  std::vector<Rig> rigs;
  for (const auto& pos : positions) {
    Rig rig;
    rig.lidar_to_world = RigidTransform(look_rotation(center - pos), pos);
    rig.camera = make_camera(pos, center, cfg.camera);
    rigs.push_back(rig);
  }
  return rigs;
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
  if (cfg.player_count < 1) throw ConfigError("scenario: player_count must be positive");
  if (cfg.frame_rate <= 0.0 || cfg.duration_s <= 0.0)
    throw ConfigError("scenario: duration and frame rate must be positive");
  if (cfg.court_width <= 2.0 || cfg.court_height <= 2.0)
    throw ConfigError("scenario: court too small");
  const double spacing = 1.2;
  const int capacity = static_cast<int>((cfg.court_width - 1.0) / spacing) *
                       static_cast<int>((cfg.court_height - 1.0) / spacing);
  if (cfg.player_count > capacity)
    throw ConfigError("scenario: player_count exceeds court capacity at minimum spacing");
  for (const auto& c : cfg.crossings) {
    if (c.a < 1 || c.a > cfg.player_count || c.b < 1 || c.b > cfg.player_count || c.a == c.b)
      throw ConfigError("scenario: crossing references an invalid player pair");
    if (c.time_s <= cfg.motion.crossing_window_s || c.time_s >= cfg.duration_s)
      throw ConfigError("scenario: crossing time outside the scenario");
  }
  for (size_t i = 0; i < cfg.crossings.size(); ++i)
    for (size_t j = i + 1; j < cfg.crossings.size(); ++j) {
      const auto& p = cfg.crossings[i];
      const auto& q = cfg.crossings[j];
      const bool share = p.a == q.a || p.a == q.b || p.b == q.a || p.b == q.b;
      if (share && std::abs(p.time_s - q.time_s) <
                       2.0 * (cfg.motion.crossing_prep_s + cfg.motion.crossing_window_s))
        throw ConfigError("scenario: crossings sharing a player overlap in time");
    }

  Scenario sc;
  sc.config = cfg;
  sc.rigs = default_rigs(cfg);
  sc.frame_count = std::max(1, static_cast<int>(std::llround(cfg.duration_s * cfg.frame_rate)));

  const int n = cfg.player_count;
  const double dt = 1.0 / cfg.frame_rate;
  const double r = cfg.body_radius;
  const double x_lo = r, x_hi = cfg.court_width - r;
  const double y_lo = r, y_hi = cfg.court_height - r;
  Rng rng(mix_seed(cfg.seed, 0x6d6f74696f6eULL));

  // Initial spread on a jittered grid.
  std::vector<Vec2> pos(n), vel(n), wp(n);
  const int cols = std::max(1, static_cast<int>(std::ceil(
                                   std::sqrt(n * cfg.court_width / cfg.court_height))));
  const int rows = (n + cols - 1) / cols;
  for (int i = 0; i < n; ++i) {
    const int cx = i % cols, cy = i / cols;
    pos[i].x = x_lo + (cx + 0.5) / cols * (x_hi - x_lo) + rng.uniform(-0.3, 0.3);
    pos[i].y = y_lo + (cy + 0.5) / rows * (y_hi - y_lo) + rng.uniform(-0.3, 0.3);
    pos[i].x = std::clamp(pos[i].x, x_lo, x_hi);
    pos[i].y = std::clamp(pos[i].y, y_lo, y_hi);
    wp[i] = Vec2{rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)};
  }

  struct CrossState {
    CrossingEvent ev;
    double prep_begin, hard_begin, hard_end;
    bool initialized = false;
    Vec2 start_a, start_b, meet, exit_a, exit_b;
  };
  std::vector<CrossState> crossings;
  for (const auto& ev : cfg.crossings) {
    CrossState cs;
    cs.ev = ev;
    cs.hard_begin = ev.time_s - cfg.motion.crossing_window_s;
    cs.hard_end = ev.time_s + cfg.motion.crossing_window_s;
    cs.prep_begin = ev.time_s - cfg.motion.crossing_prep_s;
    crossings.push_back(cs);
  }

  auto in_crossing = [&](int player, double now) {
    for (const auto& cs : crossings)
      if ((cs.ev.a == player + 1 || cs.ev.b == player + 1) && now >= cs.prep_begin &&
          now <= cs.hard_end)
        return true;
    return false;
  };

  auto record = [&](int frame) {
    sc.gt.ensure_frame(frame);
    auto& out = sc.gt.frame(frame);
    for (int i = 0; i < n; ++i)
      out.push_back(TrackedBox{i + 1, PlaneBox{pos[i].x, pos[i].y, 2.0 * r, 2.0 * r}});
  };

  record(1);
  for (int frame = 2; frame <= sc.frame_count; ++frame) {
    const double now = (frame - 1) * dt;

    // 1. Crossing prep: both players chase the midpoint between them.
    for (auto& cs : crossings) {
      if (now >= cs.prep_begin && now < cs.hard_begin) {
        const int a = cs.ev.a - 1, b = cs.ev.b - 1;
        const Vec2 mid{(pos[a].x + pos[b].x) / 2.0, (pos[a].y + pos[b].y) / 2.0};
        wp[a] = mid;
        wp[b] = mid;
      }
    }

    // 2. Steering toward waypoints plus pairwise repulsion.
    std::vector<Vec2> accel(n);
    for (int i = 0; i < n; ++i) {
      Vec2 d{wp[i].x - pos[i].x, wp[i].y - pos[i].y};
      const double len = std::hypot(d.x, d.y);
      const double want = std::min(cfg.motion.max_speed, cfg.motion.steer_gain * len);
      if (len > 1e-9) {
        d.x *= want / len;
        d.y *= want / len;
      }
      accel[i].x = cfg.motion.steer_gain * (d.x - vel[i].x);
      accel[i].y = cfg.motion.steer_gain * (d.y - vel[i].y);
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (in_crossing(i, now) && in_crossing(j, now)) continue;
        const double d = dist(pos[i], pos[j]);
        if (d < cfg.motion.repulsion_radius && d > 1e-9) {
          const double push = cfg.motion.repulsion_gain * (cfg.motion.repulsion_radius - d) / d;
          const double ux = (pos[i].x - pos[j].x) * push;
          const double uy = (pos[i].y - pos[j].y) * push;
          accel[i].x += ux;
          accel[i].y += uy;
          accel[j].x -= ux;
          accel[j].y -= uy;
        }
      }
    for (int i = 0; i < n; ++i) {
      vel[i].x += accel[i].x * dt;
      vel[i].y += accel[i].y * dt;
      const double sp = std::hypot(vel[i].x, vel[i].y);
      if (sp > cfg.motion.max_speed) {
        vel[i].x *= cfg.motion.max_speed / sp;
        vel[i].y *= cfg.motion.max_speed / sp;
      }
      pos[i].x += vel[i].x * dt;
      pos[i].y += vel[i].y * dt;
    }

    // 3. Scripted window: the pair meets at the shared point and leaves along
    // swapped directions.
    for (auto& cs : crossings) {
      if (now < cs.hard_begin || now > cs.hard_end) continue;
      const int a = cs.ev.a - 1, b = cs.ev.b - 1;
      if (!cs.initialized) {
        cs.start_a = pos[a];
        cs.start_b = pos[b];
        cs.meet = Vec2{std::clamp((pos[a].x + pos[b].x) / 2.0, x_lo, x_hi),
                       std::clamp((pos[a].y + pos[b].y) / 2.0, y_lo, y_hi)};
        const double win = cfg.motion.crossing_window_s;
        const double reach = cfg.motion.max_speed * win;
        auto approach = [&](const Vec2& s) {
          const double d = dist(s, cs.meet);
          if (d <= reach || d < 1e-9) return cs.meet;
          const double f = reach / d;
          return Vec2{s.x + (cs.meet.x - s.x) * f, s.y + (cs.meet.y - s.y) * f};
        };
        const Vec2 meet_a = approach(cs.start_a);
        const Vec2 meet_b = approach(cs.start_b);
        cs.meet = Vec2{(meet_a.x + meet_b.x) / 2.0, (meet_a.y + meet_b.y) / 2.0};
        auto exit_along = [&](const Vec2& other_start, double span) {
          double dx = cs.meet.x - other_start.x, dy = cs.meet.y - other_start.y;
          const double len = std::hypot(dx, dy);
          if (len < 1e-9) {
            dx = 1.0;
            dy = 0.0;
          } else {
            dx /= len;
            dy /= len;
          }
          return Vec2{std::clamp(cs.meet.x + dx * span, x_lo, x_hi),
                      std::clamp(cs.meet.y + dy * span, y_lo, y_hi)};
        };
        const double span_a = std::min(reach, dist(cs.start_a, cs.meet));
        const double span_b = std::min(reach, dist(cs.start_b, cs.meet));
        cs.exit_a = exit_along(cs.start_b, span_a);
        cs.exit_b = exit_along(cs.start_a, span_b);
        cs.initialized = true;
      }
      auto lerp = [](const Vec2& p, const Vec2& q, double f) {
        return Vec2{p.x + (q.x - p.x) * f, p.y + (q.y - p.y) * f};
      };
      const double win = cfg.motion.crossing_window_s;
      auto place = [&](int player, const Vec2& start, const Vec2& exit) {
        Vec2 target;
        if (now <= cs.ev.time_s) {
          const double f = std::clamp((now - cs.hard_begin) / win, 0.0, 1.0);
          target = lerp(start, cs.meet, f);
        } else {
          const double f = std::clamp((now - cs.ev.time_s) / win, 0.0, 1.0);
          target = lerp(cs.meet, exit, f);
        }
        vel[player] = Vec2{(target.x - pos[player].x) / dt, (target.y - pos[player].y) / dt};
        const double sp = std::hypot(vel[player].x, vel[player].y);
        if (sp > cfg.motion.max_speed) {
          vel[player].x *= cfg.motion.max_speed / sp;
          vel[player].y *= cfg.motion.max_speed / sp;
        }
        pos[player] = target;
      };
      place(a, cs.start_a, cs.exit_a);
      place(b, cs.start_b, cs.exit_b);
      if (now + dt > cs.hard_end) {
        wp[a] = Vec2{rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)};
        wp[b] = Vec2{rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)};
      }
    }

    // 4. Keep everyone on the court (stopping at the wall, not bouncing) and
    // refresh reached waypoints.
    for (int i = 0; i < n; ++i) {
      const double cx = std::clamp(pos[i].x, x_lo, x_hi);
      const double cy = std::clamp(pos[i].y, y_lo, y_hi);
      if (cx != pos[i].x) vel[i].x = 0.0;
      if (cy != pos[i].y) vel[i].y = 0.0;
      pos[i].x = cx;
      pos[i].y = cy;
      if (!in_crossing(i, now) && dist(pos[i], wp[i]) < cfg.motion.waypoint_tolerance)
        wp[i] = Vec2{rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)};
    }
    record(frame);
  }
  return sc;
}

PointCloud sample_lidar(const Scenario& scenario, int rig_index, int frame) {
  const auto& cfg = scenario.config;
  const Rig& rig = scenario.rigs.at(rig_index);
  const auto& players = scenario.gt.frame(frame);

  PointCloud cloud;
  cloud.frame_id = "lidar" + std::to_string(rig_index);
  cloud.timestamp = scenario.frame_time(frame);

  const Eigen::Matrix3d& rot = rig.lidar_to_world.rotation();
  const Eigen::Vector3d& origin = rig.lidar_to_world.translation();
  const Eigen::Matrix3d rot_inv = rot.transpose();

  const double az_half = cfg.lidar.az_fov_deg / 2.0 * kDeg;
  const double el_half = cfg.lidar.el_fov_deg / 2.0 * kDeg;
  const double az_step = cfg.lidar.az_res_deg * kDeg;
  const double el_step = cfg.lidar.el_res_deg * kDeg;
  const int az_n = static_cast<int>(std::floor(2.0 * az_half / az_step)) + 1;
  const int el_n = static_cast<int>(std::floor(2.0 * el_half / el_step)) + 1;

  struct Cyl {
    double cx, cy, r2, r, h;
  };
  std::vector<Cyl> cyls;
  cyls.reserve(players.size());
  for (const auto& p : players)
    cyls.push_back({p.box.cx, p.box.cy, cfg.body_radius * cfg.body_radius, cfg.body_radius,
                    cfg.body_height});

  Rng rng(mix_seed(cfg.seed, 0x6c69646172ULL + rig_index, static_cast<std::uint64_t>(frame)));
  cloud.points.reserve(static_cast<size_t>(az_n) * el_n / 2);

  for (int ei = 0; ei < el_n; ++ei) {
    const double el = -el_half + ei * el_step;
    const double ce = std::cos(el), se = std::sin(el);
    for (int ai = 0; ai < az_n; ++ai) {
      const double az = -az_half + ai * az_step;
      const Eigen::Vector3d local(ce * std::cos(az), ce * std::sin(az), se);
      const Eigen::Vector3d d = rot * local;
      double best = cfg.lidar.max_range;
      bool hit = false;

      // Floor plane z = 0.
      if (d.z() < -1e-9) {
        const double s = -origin.z() / d.z();
        if (s > 0.0 && s < best) {
          best = s;
          hit = true;
        }
      }
      // Cylinder sides and top caps; nearest intersection wins.
      const double dx = d.x(), dy = d.y();
      const double a2 = dx * dx + dy * dy;
      for (const auto& c : cyls) {
        const double ox = origin.x() - c.cx;
        const double oy = origin.y() - c.cy;
        if (a2 > 1e-12) {
          const double bq = 2.0 * (ox * dx + oy * dy);
          const double cq = ox * ox + oy * oy - c.r2;
          const double disc = bq * bq - 4.0 * a2 * cq;
          if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            for (const double s : {(-bq - sq) / (2.0 * a2), (-bq + sq) / (2.0 * a2)}) {
              if (s <= 0.0 || s >= best) continue;
              const double z = origin.z() + s * d.z();
              if (z >= 0.0 && z <= c.h) {
                best = s;
                hit = true;
                break;
              }
            }
          }
        }
        if (std::abs(d.z()) > 1e-9) {
          const double s = (c.h - origin.z()) / d.z();
          if (s > 0.0 && s < best) {
            const double px = ox + s * dx, py = oy + s * dy;
            if (px * px + py * py <= c.r2) {
              best = s;
              hit = true;
            }
          }
        }
      }
      if (!hit) continue;
      const double range = best + rng.gaussian(0.0, cfg.lidar.noise_sigma);
      const Eigen::Vector3d world = origin + range * d;
      cloud.points.push_back(rot_inv * (world - origin));
    }
  }
  return cloud;
}

double covered_fraction(const Rect& target, const std::vector<Rect>& covers) {
  if (target.degenerate()) return 0.0;
  std::vector<Rect> clipped;
  std::vector<double> xs{target.x0, target.x1};
  for (const auto& c : covers) {
    const Rect r = intersect(c, target);
    if (r.width() > 0.0 && r.height() > 0.0) {
      clipped.push_back(r);
      xs.push_back(r.x0);
      xs.push_back(r.x1);
    }
  }
  if (clipped.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double covered = 0.0;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    const double x0 = xs[i], x1 = xs[i + 1];
    const double mid = (x0 + x1) / 2.0;
    std::vector<std::pair<double, double>> spans;
    for (const auto& c : clipped)
      if (c.x0 <= mid && mid <= c.x1) spans.emplace_back(c.y0, c.y1);
    if (spans.empty()) continue;
    std::sort(spans.begin(), spans.end());
    double y = spans[0].first, yend = spans[0].second, len = 0.0;
    for (size_t k = 1; k < spans.size(); ++k) {
      if (spans[k].first > yend) {
        len += yend - y;
        y = spans[k].first;
        yend = spans[k].second;
      } else {
        yend = std::max(yend, spans[k].second);
      }
    }
    len += yend - y;
    covered += len * (x1 - x0);
  }
  return std::min(1.0, covered / target.area());
}

std::vector<CameraGtBox> render_camera_gt(const Scenario& scenario, int camera_index,
                                          int frame) {
  const auto& cfg = scenario.config;
  const CameraModel& cam = scenario.rigs.at(camera_index).camera;
  const auto& players = scenario.gt.frame(frame);

  struct Entry {
    int id;
    Rect box;
    double depth;
  };
  std::vector<Entry> entries;
  for (const auto& p : players) {
    const auto proj = project(voxel_from_rect(p.box.rect(), 0.0, cfg.body_height), cam);
    if (!proj) continue;
    const Rect clamped = proj->clamped;
    if (clamped.width() <= 0.0 || clamped.height() <= 0.0) continue;
    const Eigen::Vector3d center(p.box.cx, p.box.cy, cfg.body_height / 2.0);
    entries.push_back({p.id, clamped, cam.world_to_camera.apply(center).z()});
  }

  std::vector<CameraGtBox> out;
  for (const auto& e : entries) {
    std::vector<Rect> nearer;
    for (const auto& o : entries)
      if (o.id != e.id && o.depth < e.depth) nearer.push_back(o.box);
    CameraGtBox g;
    g.id = e.id;
    g.box = e.box;
    g.visibility = 1.0 - covered_fraction(e.box, nearer);
    out.push_back(g);
  }
  std::sort(out.begin(), out.end(),
            [](const CameraGtBox& a, const CameraGtBox& b) { return a.id < b.id; });
  return out;
}

CameraGtTable render_all_cameras(const Scenario& scenario) {
  CameraGtTable table;
  table.data.resize(scenario.rigs.size());
  for (size_t c = 0; c < scenario.rigs.size(); ++c) {
    table.data[c].resize(scenario.frame_count);
    for (int t = 1; t <= scenario.frame_count; ++t)
      table.data[c][t - 1] = render_camera_gt(scenario, static_cast<int>(c), t);
  }
  return table;
}

std::vector<double> embedding_anchor(int dim, int identity, bool orthogonal,
                                     std::uint64_t seed) {
  if (dim < 2) throw ConfigError("embedding_anchor: dim must be at least 2");
  std::vector<double> v(dim, 0.0);
  if (orthogonal) {
    v[static_cast<size_t>((identity - 1) % dim + dim) % dim] = 1.0;
    return v;
  }
  Rng rng(mix_seed(seed, 0x616e63686f72ULL, static_cast<std::uint64_t>(identity)));
  double norm2 = 0.0;
  for (double& x : v) {
    x = rng.gaussian();
    norm2 += x * x;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

std::vector<double> synth_embedding(const std::vector<double>& anchor, double sigma, Rng& rng) {
  const double per_comp = sigma / std::sqrt(static_cast<double>(anchor.size()));
  std::vector<double> v(anchor.size());
  double norm2 = 0.0;
  for (size_t i = 0; i < anchor.size(); ++i) {
    v[i] = anchor[i] + rng.gaussian(0.0, per_comp);
    norm2 += v[i] * v[i];
  }
  const double inv = 1.0 / std::sqrt(std::max(norm2, 1e-24));
  for (double& x : v) x *= inv;
  return v;
}

SyntheticCameraDetections::SyntheticCameraDetections(const CameraGtTable& gt,
                                                     std::vector<std::pair<int, int>> sizes,
                                                     CameraNoiseModel noise, std::uint64_t seed)
    : gt_(gt), image_sizes_(std::move(sizes)), noise_(noise), seed_(seed) {}

std::vector<PixelDetection> SyntheticCameraDetections::detections(int camera, int frame) const {
  const auto& boxes = gt_.at(camera, frame);
  Rng rng(mix_seed(seed_, 0x63616d646574ULL + camera, static_cast<std::uint64_t>(frame)));
  std::vector<PixelDetection> out;

  // Single-link merge of heavily overlapping boxes.
  const int n = static_cast<int>(boxes.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!boxes[i].box.degenerate() && !boxes[j].box.degenerate() &&
          iou(boxes[i].box, boxes[j].box) >= noise_.merge_iou)
        parent[find(i)] = find(j);

  std::vector<std::vector<int>> clusters(n);
  for (int i = 0; i < n; ++i) clusters[find(i)].push_back(i);
  for (int c = 0; c < n; ++c) {
    if (clusters[c].empty()) continue;
    if (clusters[c].size() == 1) {
      const bool missed = rng.uniform() < noise_.miss_rate;
      const double jx = rng.gaussian(0.0, noise_.sigma_px);
      const double jy = rng.gaussian(0.0, noise_.sigma_px);
      if (missed) continue;
      Rect b = boxes[clusters[c][0]].box;
      b.x0 += jx;
      b.x1 += jx;
      b.y0 += jy;
      b.y1 += jy;
      out.push_back(PixelDetection{b, noise_.clean_confidence});
    } else {
      Rect u = boxes[clusters[c][0]].box;
      for (size_t k = 1; k < clusters[c].size(); ++k) u = rect_union(u, boxes[clusters[c][k]].box);
      out.push_back(PixelDetection{u, noise_.merged_confidence});
    }
  }

  const auto [iw, ih] = image_sizes_.at(camera);
  const int fps = rng.poisson(noise_.fp_rate);
  for (int k = 0; k < fps; ++k) {
    const double w = rng.uniform(40.0, 160.0);
    const double h = rng.uniform(80.0, 320.0);
    const double x = rng.uniform(0.0, std::max(1.0, iw - w));
    const double y = rng.uniform(0.0, std::max(1.0, ih - h));
    out.push_back(PixelDetection{Rect{x, y, x + w, y + h}, rng.uniform(0.2, 0.9)});
  }
  return out;
}

SyntheticEmbeddings::SyntheticEmbeddings(const CameraGtTable& gt, EmbeddingModel model,
                                         std::uint64_t seed)
    : gt_(gt), model_(model), seed_(seed) {}

std::optional<EmbeddingVector> SyntheticEmbeddings::embed(int, const FrameRef& ref) const {
  const auto& boxes = gt_.at(ref.camera, ref.frame);
  if (ref.matched_image_box.degenerate()) return std::nullopt;

  // The feature comes from the image patch, so the identity is whichever
  // player the matched box actually shows.
  int best_id = -1;
  double best_iou = 0.0, best_vis = 1.0;
  for (const auto& g : boxes) {
    if (g.box.degenerate()) continue;
    const double v = iou(g.box, ref.matched_image_box);
    if (v > best_iou) {
      best_iou = v;
      best_id = g.id;
      best_vis = g.visibility;
    }
  }
  if (best_id < 0) return std::nullopt;

  const double sigma =
      model_.base_sigma * (1.0 + model_.occlusion_noise_scale * (1.0 - best_vis));
  Rng rng(mix_seed(seed_, 0x656d626564ULL + ref.camera,
                   mix_seed(static_cast<std::uint64_t>(ref.frame),
                            static_cast<std::uint64_t>(best_id))));
  const auto anchor =
      embedding_anchor(model_.dim, best_id, model_.orthogonal_anchors, seed_);
  return EmbeddingVector(synth_embedding(anchor, sigma, rng));
}

}  // namespace courtmot
