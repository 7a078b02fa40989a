#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "courtmot/common.hpp"

namespace courtmot {

struct PointCloud {
  std::string frame_id;
  double timestamp = 0.0;
  std::vector<Eigen::Vector3d> points;
};

// Rotation + translation, validated orthonormal with det +1 on construction.
class RigidTransform {
 public:
  RigidTransform();
  RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static RigidTransform identity() { return RigidTransform(); }
  static RigidTransform rotation_z(double angle_rad);

  const Eigen::Matrix3d& rotation() const { return r_; }
  const Eigen::Vector3d& translation() const { return t_; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return r_ * p + t_; }
  RigidTransform inverse() const;
  RigidTransform compose(const RigidTransform& other) const;  // this * other

 private:
  Eigen::Matrix3d r_;
  Eigen::Vector3d t_;
};

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t,
                           const std::string& target_frame = "world");

// Concatenates per-sensor clouds into the world frame. Timestamps must agree
// within max_dt (one frame period by default).
PointCloud merge_clouds(const std::vector<PointCloud>& clouds,
                        const std::vector<RigidTransform>& sensor_to_world,
                        double max_dt = 0.1);

// Convex court footprint plus a height band; boundary points are kept.
class CourtRegion {
 public:
  CourtRegion(std::vector<Eigen::Vector2d> polygon, double z_min, double z_max);

  static CourtRegion rectangle(double x0, double y0, double x1, double y1,
                               double z_min, double z_max);

  bool contains(const Eigen::Vector3d& p) const;
  bool contains_xy(double x, double y) const;
  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }
  const std::vector<Eigen::Vector2d>& polygon() const { return polygon_; }

 private:
  std::vector<Eigen::Vector2d> polygon_;  // CCW
  double z_min_, z_max_;
};

PointCloud filter_region(const PointCloud& cloud, const CourtRegion& region);

// Ground-plane raster. Cell (0,0) covers [origin, origin + resolution).
struct BevGrid {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double resolution = 0.05;
  int width = 0;
  int height = 0;

  void validate() const;

  std::pair<int, int> world_to_cell(double x, double y) const;
  // Center of the cell, inverse of world_to_cell up to quantization.
  std::pair<double, double> cell_to_world(int cx, int cy) const;
  bool in_bounds(int cx, int cy) const {
    return cx >= 0 && cx < width && cy >= 0 && cy < height;
  }
};

// Detection box on the BEV plane in continuous cell units, top-left + extent.
struct BevBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  double confidence = 0.0;

  Rect rect() const { return Rect{x, y, x + w, y + h}; }
};

BevBox bev_box_from_plane(const PlaneBox& box, const BevGrid& grid, double confidence = 0.0);
PlaneBox plane_box_from_bev(const BevBox& box, const BevGrid& grid);

struct BevImage {
  BevGrid grid;
  std::vector<std::uint32_t> cells;

  std::uint32_t at(int cx, int cy) const { return cells[static_cast<size_t>(cy) * grid.width + cx]; }
  std::uint64_t total() const;
};

BevImage rasterize_bev(const PointCloud& cloud, const BevGrid& grid);

// Axis-aligned box in world space, 8 corners in a fixed order:
// (x0,y0,z0),(x1,y0,z0),(x1,y1,z0),(x0,y1,z0), then the same ring at z1.
struct Voxel3D {
  std::array<Eigen::Vector3d, 8> corners;
};

Voxel3D voxelize(const BevBox& box, const BevGrid& grid, double z_min, double z_max);
Voxel3D voxel_from_rect(const Rect& footprint, double z_min, double z_max);

struct CameraModel {
  double fx = 0.0, fy = 0.0;
  double cx = 0.0, cy = 0.0;
  int width = 0, height = 0;
  RigidTransform world_to_camera;

  void validate() const;
  Rect image_rect() const { return Rect{0.0, 0.0, double(width), double(height)}; }
};

struct ProjectedBox {
  std::array<Eigen::Vector2d, 8> corners;
  Rect unclamped;
  Rect clamped;
  double unclamped_area = 0.0;
};

// Pinhole projection of all 8 corners; nullopt when any corner has
// non-positive depth.
std::optional<ProjectedBox> project(const Voxel3D& voxel, const CameraModel& cam);

}  // namespace courtmot
