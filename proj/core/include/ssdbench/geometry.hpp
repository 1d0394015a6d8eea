#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ssdbench {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kDefaultNearPlane = 1e-3;
inline constexpr double kDefaultMaxDepth = 10.0;
inline constexpr std::size_t kDefaultOutlierNeighbors = 20;
inline constexpr double kDefaultOutlierSigma = 2.0;

/// Rigid transform x' = R x + t.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;
  RigidTransform compose(const RigidTransform& inner) const;

  /// Orthonormal with det +1 (within `tol`) and finite translation.
  bool is_valid(double tol = 1e-9) const;
};

/// Pinhole camera. +Z forward, +X right, +Y down; pixel origin top-left.
/// `pose` maps world coordinates into the camera frame.
struct CameraModel {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
  RigidTransform pose;

  /// Throws InvalidInput when an invariant does not hold.
  void validate() const;
  bool contains_pixel(const Vec2& pixel) const {
    return pixel.x() >= 0.0 && pixel.x() < width && pixel.y() >= 0.0 && pixel.y() < height;
  }
};

struct CloudPoint {
  Vec3 position = Vec3::Zero();
  double confidence = 0.0;
  std::string label;
};

/// Points carrying a per-object confidence in [0, 1].
struct ConfidenceCloud {
  std::vector<CloudPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  void validate() const;
};

struct Projection {
  Vec2 pixel;
  double depth = 0.0;
};

/// Projects a point already expressed in the camera frame.
std::optional<Projection> project_camera_point(const Vec3& camera_point, const CameraModel& cam);

/// Projects a world point through the camera pose. std::nullopt means out of view.
std::optional<Projection> project(const Vec3& world_point, const CameraModel& cam);

/// Camera-frame point on the ray through `pixel` at the given depth.
Vec3 back_project(const Vec2& pixel, double depth, const CameraModel& cam);

/// Same as back_project but mapped back to world coordinates.
Vec3 back_project_to_world(const Vec2& pixel, double depth, const CameraModel& cam);

ConfidenceCloud transform_cloud(const ConfidenceCloud& cloud, const RigidTransform& pose);

ConfidenceCloud frustum_cull(const ConfidenceCloud& cloud,
                             const CameraModel& cam,
                             double near = kDefaultNearPlane,
                             double far = std::numeric_limits<double>::infinity());

/// Depth-buffer visibility: one surviving point per integer pixel, the
/// nearest one; equal depths keep the earlier point. Points that do not
/// project into the image are dropped.
ConfidenceCloud z_cull(const ConfidenceCloud& cloud, const CameraModel& cam);

ConfidenceCloud clip_depth(const ConfidenceCloud& cloud,
                           const CameraModel& cam,
                           double max_depth = kDefaultMaxDepth);

/// Statistical outlier removal. Each point's score is its mean distance to
/// its k nearest neighbours; points scoring above mean + sigma_mult * std
/// (population statistics over all scores) are removed.
ConfidenceCloud outlier_filter(const ConfidenceCloud& cloud,
                               std::size_t k = kDefaultOutlierNeighbors,
                               double sigma_mult = kDefaultOutlierSigma);

/// Per-point mean distance to the k nearest other points.
std::vector<double> mean_neighbor_distances(const ConfidenceCloud& cloud, std::size_t k);

}  // namespace ssdbench
