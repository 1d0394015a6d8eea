#include "ssdbench/geometry.hpp"

#include <cmath>
#include <limits>

#include "ssdbench/errors.hpp"
#include "ssdbench/kdtree.hpp"

namespace ssdbench {

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

RigidTransform RigidTransform::compose(const RigidTransform& inner) const {
  RigidTransform out;
  out.rotation = rotation * inner.rotation;
  out.translation = rotation * inner.translation + translation;
  return out;
}

bool RigidTransform::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double ortho_err = (rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho_err <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidInput("camera focal lengths must be positive");
  if (width <= 0 || height <= 0) throw InvalidInput("camera extent must be positive");
  if (!(cx >= 0.0 && cx <= width) || !(cy >= 0.0 && cy <= height)) {
    throw InvalidInput("camera principal point outside the image");
  }
  if (!pose.is_valid()) throw InvalidInput("camera pose is not a rigid transform");
}

void ConfidenceCloud::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!p.position.allFinite()) {
      throw InvalidInput("cloud point " + std::to_string(i) + " has non-finite coordinates");
    }
    if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
      throw InvalidInput("cloud point " + std::to_string(i) + " has confidence outside [0,1]");
    }
  }
}

std::optional<Projection> project_camera_point(const Vec3& camera_point, const CameraModel& cam) {
  const double z = camera_point.z();
  if (!(z > 0.0)) return std::nullopt;
  const Vec2 pixel(cam.fx * camera_point.x() / z + cam.cx, cam.fy * camera_point.y() / z + cam.cy);
  if (!cam.contains_pixel(pixel)) return std::nullopt;
  return Projection{pixel, z};
}

std::optional<Projection> project(const Vec3& world_point, const CameraModel& cam) {
  return project_camera_point(cam.pose.apply(world_point), cam);
}

Vec3 back_project(const Vec2& pixel, double depth, const CameraModel& cam) {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw InvalidInput("back_project: depth must be positive and finite");
  }
  if (!cam.contains_pixel(pixel)) throw InvalidInput("back_project: pixel outside the image");
  return {(pixel.x() - cam.cx) * depth / cam.fx, (pixel.y() - cam.cy) * depth / cam.fy, depth};
}

Vec3 back_project_to_world(const Vec2& pixel, double depth, const CameraModel& cam) {
  return cam.pose.inverse().apply(back_project(pixel, depth, cam));
}

ConfidenceCloud transform_cloud(const ConfidenceCloud& cloud, const RigidTransform& pose) {
  ConfidenceCloud out;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    out.points.push_back({pose.apply(p.position), p.confidence, p.label});
  }
  return out;
}

ConfidenceCloud frustum_cull(const ConfidenceCloud& cloud, const CameraModel& cam, double near,
                             double far) {
  if (!(near > 0.0) || !(far > near)) throw InvalidInput("frustum_cull: need 0 < near < far");
  ConfidenceCloud out;
  for (const auto& p : cloud.points) {
    const Vec3 pc = cam.pose.apply(p.position);
    if (pc.z() < near || pc.z() > far) continue;
    if (project_camera_point(pc, cam)) out.points.push_back(p);
  }
  return out;
}

ConfidenceCloud z_cull(const ConfidenceCloud& cloud, const CameraModel& cam) {
  constexpr std::size_t kEmpty = std::numeric_limits<std::size_t>::max();
  const auto w = static_cast<std::size_t>(cam.width);
  const auto h = static_cast<std::size_t>(cam.height);
  std::vector<std::size_t> owner(w * h, kEmpty);
  std::vector<double> depth(w * h, std::numeric_limits<double>::infinity());

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto proj = project(cloud.points[i].position, cam);
    if (!proj) continue;
    const auto col = static_cast<std::size_t>(std::floor(proj->pixel.x()));
    const auto row = static_cast<std::size_t>(std::floor(proj->pixel.y()));
    const std::size_t slot = row * w + col;
    if (proj->depth < depth[slot]) {
      depth[slot] = proj->depth;
      owner[slot] = i;
    }
  }

  std::vector<bool> keep(cloud.size(), false);
  for (const std::size_t i : owner) {
    if (i != kEmpty) keep[i] = true;
  }
  ConfidenceCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (keep[i]) out.points.push_back(cloud.points[i]);
  }
  return out;
}

ConfidenceCloud clip_depth(const ConfidenceCloud& cloud, const CameraModel& cam, double max_depth) {
  if (!(max_depth > 0.0)) throw InvalidInput("clip_depth: max_depth must be positive");
  ConfidenceCloud out;
  for (const auto& p : cloud.points) {
    if (cam.pose.apply(p.position).z() <= max_depth) out.points.push_back(p);
  }
  return out;
}

std::vector<double> mean_neighbor_distances(const ConfidenceCloud& cloud, std::size_t k) {
  if (k == 0) throw InvalidInput("mean_neighbor_distances: k must be at least 1");
  std::vector<KdTree<3>::Point> pts;
  pts.reserve(cloud.size());
  for (const auto& p : cloud.points) pts.push_back({p.position.x(), p.position.y(), p.position.z()});
  const KdTree<3> tree(pts);

  std::vector<double> scores(cloud.size(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto nbrs = tree.k_nearest(pts[i], k, i);
    if (nbrs.empty()) continue;
    double sum = 0.0;
    for (const auto& n : nbrs) sum += std::sqrt(n.squared_distance);
    scores[i] = sum / static_cast<double>(nbrs.size());
  }
  return scores;
}

ConfidenceCloud outlier_filter(const ConfidenceCloud& cloud, std::size_t k, double sigma_mult) {
  if (k == 0) throw InvalidInput("outlier_filter: k must be at least 1");
  if (cloud.size() <= k) return cloud;

  const auto scores = mean_neighbor_distances(cloud, k);
  const double n = static_cast<double>(scores.size());
  double mean = 0.0;
  for (const double s : scores) mean += s;
  mean /= n;
  double var = 0.0;
  for (const double s : scores) var += (s - mean) * (s - mean);
  const double limit = mean + sigma_mult * std::sqrt(var / n);

  ConfidenceCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (scores[i] <= limit) out.points.push_back(cloud.points[i]);
  }
  return out;
}

}  // namespace ssdbench
