#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssdbench/geometry.hpp"
#include "ssdbench/grid.hpp"

namespace ssdbench {

struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
};

struct Detection {
  std::string image_id;
  BBox bbox;
  std::string label;
  double confidence = 0.0;

  /// Box ordered and inside a width x height image; confidence in [0,1].
  void validate(int width, int height) const;
};

/// Dense per-pixel depth, row-major. Entries that are not positive and finite
/// mark pixels without depth.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> depth;

  DepthMap() = default;
  DepthMap(int w, int h) : width(w), height(h), depth(static_cast<std::size_t>(w) * h, 0.0) {}

  double at(int row, int col) const { return depth[static_cast<std::size_t>(row) * width + col]; }
  bool has_depth(int row, int col) const {
    const double d = at(row, col);
    return d > 0.0 && std::isfinite(d);
  }
};

struct PosedFrame {
  std::string image_id;
  CameraModel camera;
  std::vector<Detection> detections;
  std::optional<DepthMap> depth;

  void validate() const;
};

/// Keeps detections with confidence strictly above tau_conf.
std::vector<Detection> filter_detections(const std::vector<Detection>& detections, double tau_conf);

/// Row-major width x height map. A pixel covered by at least one box of
/// `label` (pixel centre inside the half-open box) carries the highest such
/// confidence; other pixels are 0.
std::vector<double> confidence_map(const std::vector<Detection>& detections, std::string_view label,
                                   int width, int height);

/// Nearest-point depth per pixel after frustum and depth-buffer culling.
DepthMap render_depth(const ConfidenceCloud& world_cloud, const CameraModel& cam);

/// Outlier filtering followed by depth clipping relative to the input camera.
ConfidenceCloud preprocess_reconstruction(const ConfidenceCloud& recon, const CameraModel& input_cam,
                                          std::size_t k = kDefaultOutlierNeighbors,
                                          double sigma_mult = kDefaultOutlierSigma,
                                          double max_depth = kDefaultMaxDepth);

/// World-frame points carrying the detection confidence of `label`.
/// Frames with a depth map back-project every covered pixel centre at its
/// depth. Frames without one use the reconstruction: each reconstructed
/// point visible in the frame (depth-buffer culled) inherits the confidence
/// of the pixel it lands on. Pixels without depth contribute nothing.
ConfidenceCloud backproject_detections(const std::vector<PosedFrame>& frames,
                                       const ConfidenceCloud& recon, std::string_view label,
                                       double tau_conf);

/// Raw per-pixel map of the expanded input frame, or std::nullopt when the
/// label has no detection above tau_conf.
std::optional<ConfidenceGrid> gt_2d_raw(const PosedFrame& frame, std::string_view label,
                                        const ImageDomain& domain, double tau_conf);
std::optional<SpatialDistribution> gt_2d(const PosedFrame& frame, std::string_view label,
                                         const ImageDomain& domain, double tau_conf);

/// Voxelizes an already labelled world cloud in the input camera frame.
/// std::nullopt when no non-zero confidence lands inside the grid.
std::optional<ConfidenceGrid> gt_3d_raw_from_cloud(const ConfidenceCloud& labelled_world,
                                                   const CameraModel& input_cam,
                                                   const VoxelDomain& domain, std::string_view label);
std::optional<ConfidenceGrid> gt_3d_raw(const std::vector<PosedFrame>& frames,
                                        const ConfidenceCloud& recon, std::string_view label,
                                        const CameraModel& input_cam, const VoxelDomain& domain,
                                        double tau_conf);
std::optional<SpatialDistribution> gt_3d(const std::vector<PosedFrame>& frames,
                                         const ConfidenceCloud& recon, std::string_view label,
                                         const CameraModel& input_cam, const VoxelDomain& domain,
                                         double tau_conf);

/// Frustum, depth-buffer and depth culling against the input camera, then
/// voxelization. Zero-confidence points take part in the depth buffer as
/// occluders but not in the voxel means.
std::optional<ConfidenceGrid> gt_25d_raw_from_cloud(const ConfidenceCloud& world_cloud,
                                                    const CameraModel& input_cam,
                                                    const VoxelDomain& domain, std::string_view label,
                                                    double max_depth = kDefaultMaxDepth);
std::optional<ConfidenceGrid> gt_25d_raw(const std::vector<PosedFrame>& frames,
                                         const ConfidenceCloud& recon, std::string_view label,
                                         const CameraModel& input_cam, const VoxelDomain& domain,
                                         double tau_conf, double max_depth = kDefaultMaxDepth);
std::optional<SpatialDistribution> gt_25d(const std::vector<PosedFrame>& frames,
                                          const ConfidenceCloud& recon, std::string_view label,
                                          const CameraModel& input_cam, const VoxelDomain& domain,
                                          double tau_conf, double max_depth = kDefaultMaxDepth);

}  // namespace ssdbench
