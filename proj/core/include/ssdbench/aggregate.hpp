#pragma once

#include <string_view>
#include <vector>

#include "ssdbench/geometry.hpp"
#include "ssdbench/grid.hpp"
#include "ssdbench/groundtruth.hpp"

namespace ssdbench {

/// Yes-answer counts for one region of the expanded image.
struct RegionVote {
  int yes = 0;
  int queries = 0;
};

struct RegionCounts {
  RegionVote left;
  RegionVote center;
  RegionVote right;

  void validate() const;
};

/// Mean of per-sample confidence maps over the expanded image (pre-softmax).
ConfidenceGrid aggregate_2d_raw(const std::vector<std::vector<double>>& sample_maps,
                                const ImageDomain& domain, std::string_view label);
SpatialDistribution aggregate_2d(const std::vector<std::vector<double>>& sample_maps,
                                 const ImageDomain& domain, std::string_view label);

/// Per-sample maps built from detections with the same rule as the 2D
/// ground truth.
std::vector<std::vector<double>> sample_maps_from_detections(
    const std::vector<std::vector<Detection>>& samples, std::string_view label,
    const ImageDomain& domain, double tau_conf);

/// Clouds are expected in the input-camera frame. Points of other labels are
/// ignored; an empty concatenation is an error.
ConfidenceGrid aggregate_3d_raw(const std::vector<ConfidenceCloud>& samples, const VoxelDomain& domain,
                                std::string_view label, Task kind = Task::k3D);
SpatialDistribution aggregate_3d(const std::vector<ConfidenceCloud>& samples, const VoxelDomain& domain,
                                 std::string_view label);

/// 2.5D path for point-cloud samples: the concatenated input-camera-frame
/// cloud is frustum, depth-buffer and depth culled before voxelization.
SpatialDistribution aggregate_25d(const std::vector<ConfidenceCloud>& samples, const CameraModel& input_cam,
                                  const VoxelDomain& domain, std::string_view label,
                                  double max_depth = kDefaultMaxDepth);

/// A raw 2D map paired with the metric depth it should be lifted with.
struct LiftSample {
  const std::vector<double>* raw = nullptr;
  const DepthMap* depth = nullptr;
};

/// Back-projects every pixel with positive raw confidence and depth in
/// (0, max_depth] through `cam` (pose ignored: output is camera frame), pools
/// the points with the non-zero mean and softmax-normalizes. Throws when no
/// pixel survives.
SpatialDistribution lift_samples_to_25d(const std::vector<LiftSample>& samples, const CameraModel& cam,
                                        const VoxelDomain& domain, std::string_view label,
                                        double max_depth = kDefaultMaxDepth);

SpatialDistribution lift_2d_to_25d(const ConfidenceGrid& raw2d, const DepthMap* depth,
                                   const CameraModel& cam, const VoxelDomain& domain,
                                   double max_depth = kDefaultMaxDepth);

/// Region scores (yes / queries) are softmax-normalized across the three
/// regions, then each region's mass is spread evenly over its pixels.
SpatialDistribution vlm_region_distribution(const RegionCounts& counts, const ImageDomain& domain,
                                            std::string_view label);

}  // namespace ssdbench
