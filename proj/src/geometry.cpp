#include "courtmot/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace courtmot {

double iou(const Rect& a, const Rect& b) {
  if (a.degenerate() || b.degenerate())
    throw std::invalid_argument("iou: degenerate box");
  const Rect inter = intersect(a, b);
  const double iw = std::max(0.0, inter.width());
  const double ih = std::max(0.0, inter.height());
  const double i = iw * ih;
  const double u = a.area() + b.area() - i;
  return i / u;
}

RigidTransform::RigidTransform() : r_(Eigen::Matrix3d::Identity()), t_(Eigen::Vector3d::Zero()) {}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : r_(rotation), t_(translation) {
  const Eigen::Matrix3d err = r_.transpose() * r_ - Eigen::Matrix3d::Identity();
  if (err.cwiseAbs().maxCoeff() > 1e-9 || std::abs(r_.determinant() - 1.0) > 1e-9)
    throw std::invalid_argument("RigidTransform: rotation not orthonormal with det +1");
}

RigidTransform RigidTransform::rotation_z(double angle_rad) {
  Eigen::Matrix3d r;
  const double c = std::cos(angle_rad), s = std::sin(angle_rad);
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return RigidTransform(r, Eigen::Vector3d::Zero());
}

RigidTransform RigidTransform::inverse() const {
  return RigidTransform(r_.transpose(), -(r_.transpose() * t_));
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
  return RigidTransform(r_ * other.r_, r_ * other.t_ + t_);
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t,
                           const std::string& target_frame) {
  PointCloud out;
  out.frame_id = target_frame;
  out.timestamp = cloud.timestamp;
  out.points.resize(cloud.points.size());
  const Eigen::Matrix3d& r = t.rotation();
  const Eigen::Vector3d& tr = t.translation();
  for (size_t i = 0; i < cloud.points.size(); ++i) out.points[i] = r * cloud.points[i] + tr;
  return out;
}

PointCloud merge_clouds(const std::vector<PointCloud>& clouds,
                        const std::vector<RigidTransform>& sensor_to_world, double max_dt) {
  if (clouds.empty()) throw DataError("merge_clouds: empty input");
  if (clouds.size() != sensor_to_world.size())
    throw std::invalid_argument("merge_clouds: cloud/pose count mismatch");
  for (const auto& c : clouds)
    if (std::abs(c.timestamp - clouds[0].timestamp) > max_dt)
      throw DataError("merge_clouds: timestamps differ by more than one frame period");

  PointCloud out;
  out.frame_id = "world";
  out.timestamp = clouds[0].timestamp;
  size_t total = 0;
  for (const auto& c : clouds) total += c.points.size();
  out.points.reserve(total);
  for (size_t k = 0; k < clouds.size(); ++k) {
    const Eigen::Matrix3d& r = sensor_to_world[k].rotation();
    const Eigen::Vector3d& t = sensor_to_world[k].translation();
    for (const auto& p : clouds[k].points) out.points.push_back(r * p + t);
  }
  return out;
}

CourtRegion::CourtRegion(std::vector<Eigen::Vector2d> polygon, double z_min, double z_max)
    : polygon_(std::move(polygon)), z_min_(z_min), z_max_(z_max) {
  if (polygon_.size() < 3) throw ConfigError("CourtRegion: polygon needs at least 3 vertices");
  if (!(z_min_ < z_max_)) throw ConfigError("CourtRegion: z_min must be below z_max");
  double area2 = 0.0;
  for (size_t i = 0; i < polygon_.size(); ++i) {
    const auto& a = polygon_[i];
    const auto& b = polygon_[(i + 1) % polygon_.size()];
    area2 += a.x() * b.y() - b.x() * a.y();
  }
  if (std::abs(area2) < 1e-12) throw ConfigError("CourtRegion: degenerate polygon");
  if (area2 < 0.0) std::reverse(polygon_.begin(), polygon_.end());
}

CourtRegion CourtRegion::rectangle(double x0, double y0, double x1, double y1, double z_min,
                                   double z_max) {
  return CourtRegion({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, z_min, z_max);
}

bool CourtRegion::contains_xy(double x, double y) const {
  for (size_t i = 0; i < polygon_.size(); ++i) {
    const auto& a = polygon_[i];
    const auto& b = polygon_[(i + 1) % polygon_.size()];
    const double cross = (b.x() - a.x()) * (y - a.y()) - (b.y() - a.y()) * (x - a.x());
    if (cross < -1e-12) return false;
  }
  return true;
}

bool CourtRegion::contains(const Eigen::Vector3d& p) const {
  if (p.z() < z_min_ || p.z() > z_max_) return false;
  return contains_xy(p.x(), p.y());
}

PointCloud filter_region(const PointCloud& cloud, const CourtRegion& region) {
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.timestamp = cloud.timestamp;
  out.points.reserve(cloud.points.size());
  for (const auto& p : cloud.points)
    if (region.contains(p)) out.points.push_back(p);
  return out;
}

void BevGrid::validate() const {
  if (resolution <= 0.0 || width <= 0 || height <= 0)
    throw ConfigError("BevGrid: resolution and extents must be positive");
}

std::pair<int, int> BevGrid::world_to_cell(double x, double y) const {
  return {static_cast<int>(std::floor((x - origin_x) / resolution)),
          static_cast<int>(std::floor((y - origin_y) / resolution))};
}

std::pair<double, double> BevGrid::cell_to_world(int cx, int cy) const {
  return {origin_x + (cx + 0.5) * resolution, origin_y + (cy + 0.5) * resolution};
}

BevBox bev_box_from_plane(const PlaneBox& box, const BevGrid& grid, double confidence) {
  BevBox b;
  b.x = (box.cx - box.w / 2 - grid.origin_x) / grid.resolution;
  b.y = (box.cy - box.h / 2 - grid.origin_y) / grid.resolution;
  b.w = box.w / grid.resolution;
  b.h = box.h / grid.resolution;
  b.confidence = confidence;
  return b;
}

PlaneBox plane_box_from_bev(const BevBox& box, const BevGrid& grid) {
  PlaneBox p;
  p.w = box.w * grid.resolution;
  p.h = box.h * grid.resolution;
  p.cx = grid.origin_x + (box.x + box.w / 2) * grid.resolution;
  p.cy = grid.origin_y + (box.y + box.h / 2) * grid.resolution;
  return p;
}

std::uint64_t BevImage::total() const {
  std::uint64_t s = 0;
  for (auto c : cells) s += c;
  return s;
}

BevImage rasterize_bev(const PointCloud& cloud, const BevGrid& grid) {
  grid.validate();
  BevImage img;
  img.grid = grid;
  img.cells.assign(static_cast<size_t>(grid.width) * grid.height, 0);
  for (const auto& p : cloud.points) {
    auto [cx, cy] = grid.world_to_cell(p.x(), p.y());
    if (grid.in_bounds(cx, cy)) ++img.cells[static_cast<size_t>(cy) * grid.width + cx];
  }
  return img;
}

Voxel3D voxel_from_rect(const Rect& footprint, double z_min, double z_max) {
  if (footprint.degenerate()) throw std::invalid_argument("voxelize: degenerate footprint");
  if (!(z_min < z_max)) throw std::invalid_argument("voxelize: degenerate height range");
  Voxel3D v;
  const double xs[2] = {footprint.x0, footprint.x1};
  const double ys[4] = {footprint.y0, footprint.y0, footprint.y1, footprint.y1};
  const double xo[4] = {xs[0], xs[1], xs[1], xs[0]};
  for (int ring = 0; ring < 2; ++ring) {
    const double z = ring == 0 ? z_min : z_max;
    for (int i = 0; i < 4; ++i) v.corners[ring * 4 + i] = Eigen::Vector3d(xo[i], ys[i], z);
  }
  return v;
}

Voxel3D voxelize(const BevBox& box, const BevGrid& grid, double z_min, double z_max) {
  grid.validate();
  const Rect cells = box.rect();
  const Rect world{grid.origin_x + cells.x0 * grid.resolution,
                   grid.origin_y + cells.y0 * grid.resolution,
                   grid.origin_x + cells.x1 * grid.resolution,
                   grid.origin_y + cells.y1 * grid.resolution};
  return voxel_from_rect(world, z_min, z_max);
}

void CameraModel::validate() const {
  if (fx <= 0.0 || fy <= 0.0) throw ConfigError("CameraModel: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw ConfigError("CameraModel: image size must be positive");
  if (cx < 0.0 || cx > width || cy < 0.0 || cy > height)
    throw ConfigError("CameraModel: principal point outside image");
}

std::optional<ProjectedBox> project(const Voxel3D& voxel, const CameraModel& cam) {
  ProjectedBox out;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  for (int i = 0; i < 8; ++i) {
    const Eigen::Vector3d pc = cam.world_to_camera.apply(voxel.corners[i]);
    if (pc.z() <= 1e-9) return std::nullopt;
    const double u = cam.fx * pc.x() / pc.z() + cam.cx;
    const double v = cam.fy * pc.y() / pc.z() + cam.cy;
    out.corners[i] = Eigen::Vector2d(u, v);
    if (i == 0) {
      x0 = x1 = u;
      y0 = y1 = v;
    } else {
      x0 = std::min(x0, u);
      x1 = std::max(x1, u);
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  out.unclamped = Rect{x0, y0, x1, y1};
  out.unclamped_area = out.unclamped.area();
  Rect c = intersect(out.unclamped, cam.image_rect());
  if (c.width() < 0.0 || c.height() < 0.0) c = Rect{0, 0, 0, 0};
  out.clamped = c;
  return out;
}

}  // namespace courtmot
