#include "ssdbench/groundtruth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssdbench/errors.hpp"

namespace ssdbench {

void Detection::validate(int width, int height) const {
  if (!(bbox.x_min < bbox.x_max) || !(bbox.y_min < bbox.y_max)) {
    throw InvalidInput("detection '" + label + "' in " + image_id + ": degenerate box");
  }
  if (bbox.x_min < 0.0 || bbox.y_min < 0.0 || bbox.x_max > width || bbox.y_max > height) {
    throw InvalidInput("detection '" + label + "' in " + image_id + ": box outside the image");
  }
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw InvalidInput("detection '" + label + "' in " + image_id + ": confidence outside [0,1]");
  }
}

void PosedFrame::validate() const {
  camera.validate();
  for (const auto& d : detections) d.validate(camera.width, camera.height);
  if (depth) {
    if (depth->width != camera.width || depth->height != camera.height ||
        depth->depth.size() != static_cast<std::size_t>(camera.width) * camera.height) {
      throw InvalidInput("frame " + image_id + ": depth map does not match the camera extent");
    }
  }
}

std::vector<Detection> filter_detections(const std::vector<Detection>& detections, double tau_conf) {
  std::vector<Detection> kept;
  std::copy_if(detections.begin(), detections.end(), std::back_inserter(kept),
               [&](const Detection& d) { return d.confidence > tau_conf; });
  return kept;
}

namespace {

// Half-open range of pixel indices whose centres lie in [lo, hi).
std::pair<int, int> covered_pixels(double lo, double hi, int extent) {
  const int first = std::max(0, static_cast<int>(std::ceil(lo - 0.5)));
  const int last = std::min(extent, static_cast<int>(std::ceil(hi - 0.5)));
  return {first, last};
}

}  // namespace

std::vector<double> confidence_map(const std::vector<Detection>& detections, std::string_view label,
                                   int width, int height) {
  std::vector<double> map(static_cast<std::size_t>(width) * height, 0.0);
  for (const auto& d : detections) {
    if (d.label != label) continue;
    const auto [c0, c1] = covered_pixels(d.bbox.x_min, d.bbox.x_max, width);
    const auto [r0, r1] = covered_pixels(d.bbox.y_min, d.bbox.y_max, height);
    for (int r = r0; r < r1; ++r) {
      double* row = map.data() + static_cast<std::size_t>(r) * width;
      for (int c = c0; c < c1; ++c) row[c] = std::max(row[c], d.confidence);
    }
  }
  return map;
}

DepthMap render_depth(const ConfidenceCloud& world_cloud, const CameraModel& cam) {
  DepthMap out(cam.width, cam.height);
  const auto visible = z_cull(frustum_cull(world_cloud, cam), cam);
  for (const auto& p : visible.points) {
    const auto proj = project(p.position, cam);
    const auto col = static_cast<std::size_t>(std::floor(proj->pixel.x()));
    const auto row = static_cast<std::size_t>(std::floor(proj->pixel.y()));
    out.depth[row * static_cast<std::size_t>(cam.width) + col] = proj->depth;
  }
  return out;
}

ConfidenceCloud preprocess_reconstruction(const ConfidenceCloud& recon, const CameraModel& input_cam,
                                          std::size_t k, double sigma_mult, double max_depth) {
  return clip_depth(outlier_filter(recon, k, sigma_mult), input_cam, max_depth);
}

ConfidenceCloud backproject_detections(const std::vector<PosedFrame>& frames,
                                       const ConfidenceCloud& recon, std::string_view label,
                                       double tau_conf) {
  ConfidenceCloud out;
  const std::string label_str(label);
  for (const auto& frame : frames) {
    const auto& cam = frame.camera;
    const auto map = confidence_map(filter_detections(frame.detections, tau_conf), label, cam.width,
                                    cam.height);
    if (std::none_of(map.begin(), map.end(), [](double c) { return c > 0.0; })) continue;

    if (frame.depth) {
      const auto to_world = cam.pose.inverse();
      for (int r = 0; r < cam.height; ++r) {
        for (int c = 0; c < cam.width; ++c) {
          const double conf = map[static_cast<std::size_t>(r) * cam.width + c];
          if (conf <= 0.0 || !frame.depth->has_depth(r, c)) continue;
          const Vec3 pc = back_project(Vec2(c + 0.5, r + 0.5), frame.depth->at(r, c), cam);
          out.points.push_back({to_world.apply(pc), conf, label_str});
        }
      }
      continue;
    }

    const auto visible = z_cull(frustum_cull(recon, cam), cam);
    for (const auto& p : visible.points) {
      const auto proj = project(p.position, cam);
      const auto col = static_cast<std::size_t>(std::floor(proj->pixel.x()));
      const auto row = static_cast<std::size_t>(std::floor(proj->pixel.y()));
      const double conf = map[row * static_cast<std::size_t>(cam.width) + col];
      if (conf > 0.0) out.points.push_back({p.position, conf, label_str});
    }
  }
  return out;
}

std::optional<ConfidenceGrid> gt_2d_raw(const PosedFrame& frame, std::string_view label,
                                        const ImageDomain& domain, double tau_conf) {
  domain.validate();
  if (frame.camera.width != domain.width_full() || frame.camera.height != domain.height) {
    throw InvalidInput("frame " + frame.image_id + " is " + std::to_string(frame.camera.width) + "x" +
                       std::to_string(frame.camera.height) + ", expected the expanded domain " +
                       std::to_string(domain.width_full()) + "x" + std::to_string(domain.height));
  }
  const auto kept = filter_detections(frame.detections, tau_conf);
  const bool present = std::any_of(kept.begin(), kept.end(), [&](const Detection& d) { return d.label == label; });
  if (!present) return std::nullopt;
  return ConfidenceGrid{domain, confidence_map(kept, label, domain.width_full(), domain.height),
                        std::string(label), Task::k2D};
}

std::optional<SpatialDistribution> gt_2d(const PosedFrame& frame, std::string_view label,
                                         const ImageDomain& domain, double tau_conf) {
  auto raw = gt_2d_raw(frame, label, domain, tau_conf);
  if (!raw) return std::nullopt;
  return softmax_normalize(*raw);
}

namespace {

std::optional<ConfidenceGrid> voxelize(const ConfidenceCloud& camera_cloud, const VoxelDomain& domain,
                                       std::string_view label, Task kind) {
  auto raw = pool_nonzero_mean(camera_cloud, domain, label);
  if (std::none_of(raw.begin(), raw.end(), [](double v) { return v > 0.0; })) return std::nullopt;
  return ConfidenceGrid{domain, std::move(raw), std::string(label), kind};
}

ConfidenceCloud with_occluders(ConfidenceCloud labelled, const ConfidenceCloud& recon) {
  labelled.points.reserve(labelled.size() + recon.size());
  for (const auto& p : recon.points) labelled.points.push_back({p.position, 0.0, std::string()});
  return labelled;
}

}  // namespace

std::optional<ConfidenceGrid> gt_3d_raw_from_cloud(const ConfidenceCloud& labelled_world,
                                                   const CameraModel& input_cam,
                                                   const VoxelDomain& domain, std::string_view label) {
  return voxelize(transform_cloud(labelled_world, input_cam.pose), domain, label, Task::k3D);
}

std::optional<ConfidenceGrid> gt_3d_raw(const std::vector<PosedFrame>& frames,
                                        const ConfidenceCloud& recon, std::string_view label,
                                        const CameraModel& input_cam, const VoxelDomain& domain,
                                        double tau_conf) {
  return gt_3d_raw_from_cloud(backproject_detections(frames, recon, label, tau_conf), input_cam, domain,
                              label);
}

std::optional<SpatialDistribution> gt_3d(const std::vector<PosedFrame>& frames,
                                         const ConfidenceCloud& recon, std::string_view label,
                                         const CameraModel& input_cam, const VoxelDomain& domain,
                                         double tau_conf) {
  auto raw = gt_3d_raw(frames, recon, label, input_cam, domain, tau_conf);
  if (!raw) return std::nullopt;
  return softmax_normalize(*raw);
}

std::optional<ConfidenceGrid> gt_25d_raw_from_cloud(const ConfidenceCloud& world_cloud,
                                                    const CameraModel& input_cam,
                                                    const VoxelDomain& domain, std::string_view label,
                                                    double max_depth) {
  const auto visible = clip_depth(z_cull(frustum_cull(world_cloud, input_cam), input_cam), input_cam, max_depth);
  return voxelize(transform_cloud(visible, input_cam.pose), domain, label, Task::k25D);
}

std::optional<ConfidenceGrid> gt_25d_raw(const std::vector<PosedFrame>& frames,
                                         const ConfidenceCloud& recon, std::string_view label,
                                         const CameraModel& input_cam, const VoxelDomain& domain,
                                         double tau_conf, double max_depth) {
  const auto labelled = backproject_detections(frames, recon, label, tau_conf);
  return gt_25d_raw_from_cloud(with_occluders(labelled, recon), input_cam, domain, label, max_depth);
}

std::optional<SpatialDistribution> gt_25d(const std::vector<PosedFrame>& frames,
                                          const ConfidenceCloud& recon, std::string_view label,
                                          const CameraModel& input_cam, const VoxelDomain& domain,
                                          double tau_conf, double max_depth) {
  auto raw = gt_25d_raw(frames, recon, label, input_cam, domain, tau_conf, max_depth);
  if (!raw) return std::nullopt;
  return softmax_normalize(*raw);
}

}  // namespace ssdbench
