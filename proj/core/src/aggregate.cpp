#include "ssdbench/aggregate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ssdbench/errors.hpp"

namespace ssdbench {

void RegionCounts::validate() const {
  for (const auto& v : {left, center, right}) {
    if (v.queries <= 0) throw InvalidInput("region counts need at least one query per region");
    if (v.yes < 0 || v.yes > v.queries) throw InvalidInput("region yes count outside [0, queries]");
  }
}

ConfidenceGrid aggregate_2d_raw(const std::vector<std::vector<double>>& sample_maps,
                                const ImageDomain& domain, std::string_view label) {
  domain.validate();
  if (sample_maps.empty()) throw InvalidInput("aggregate_2d: no samples");
  const std::size_t n = domain.size();
  std::vector<double> mean(n, 0.0);
  for (const auto& m : sample_maps) {
    if (m.size() != n) throw InvalidInput("aggregate_2d: sample map does not match the image domain");
    for (std::size_t i = 0; i < n; ++i) mean[i] += m[i];
  }
  const double count = static_cast<double>(sample_maps.size());
  for (double& v : mean) v /= count;
  return ConfidenceGrid{domain, std::move(mean), std::string(label), Task::k2D};
}

SpatialDistribution aggregate_2d(const std::vector<std::vector<double>>& sample_maps,
                                 const ImageDomain& domain, std::string_view label) {
  return softmax_normalize(aggregate_2d_raw(sample_maps, domain, label));
}

std::vector<std::vector<double>> sample_maps_from_detections(
    const std::vector<std::vector<Detection>>& samples, std::string_view label,
    const ImageDomain& domain, double tau_conf) {
  std::vector<std::vector<double>> maps;
  maps.reserve(samples.size());
  for (const auto& dets : samples) {
    maps.push_back(confidence_map(filter_detections(dets, tau_conf), label, domain.width_full(), domain.height));
  }
  return maps;
}

namespace {

ConfidenceCloud concatenate(const std::vector<ConfidenceCloud>& samples) {
  ConfidenceCloud all;
  std::size_t total = 0;
  for (const auto& s : samples) total += s.size();
  all.points.reserve(total);
  for (const auto& s : samples) all.points.insert(all.points.end(), s.points.begin(), s.points.end());
  return all;
}

}  // namespace

ConfidenceGrid aggregate_3d_raw(const std::vector<ConfidenceCloud>& samples, const VoxelDomain& domain,
                                std::string_view label, Task kind) {
  const auto all = concatenate(samples);
  if (all.empty()) throw InvalidInput("aggregate_3d: no points in any sample");
  return ConfidenceGrid{domain, pool_nonzero_mean(all, domain, label), std::string(label), kind};
}

SpatialDistribution aggregate_3d(const std::vector<ConfidenceCloud>& samples, const VoxelDomain& domain,
                                 std::string_view label) {
  return softmax_normalize(aggregate_3d_raw(samples, domain, label));
}

SpatialDistribution aggregate_25d(const std::vector<ConfidenceCloud>& samples, const CameraModel& input_cam,
                                  const VoxelDomain& domain, std::string_view label, double max_depth) {
  auto all = concatenate(samples);
  if (all.empty()) throw InvalidInput("aggregate_25d: no points in any sample");
  CameraModel cam = input_cam;
  cam.pose = RigidTransform::identity();
  const auto visible = clip_depth(z_cull(frustum_cull(all, cam), cam), cam, max_depth);
  return softmax_normalize(
      ConfidenceGrid{domain, pool_nonzero_mean(visible, domain, label), std::string(label), Task::k25D});
}

SpatialDistribution lift_samples_to_25d(const std::vector<LiftSample>& samples, const CameraModel& cam,
                                        const VoxelDomain& domain, std::string_view label, double max_depth) {
  if (samples.empty()) throw InvalidInput("lift_2d_to_25d: no samples");
  CameraModel camera_frame = cam;
  camera_frame.pose = RigidTransform::identity();
  const std::string label_str(label);
  ConfidenceCloud points;
  for (const auto& s : samples) {
    if (s.depth == nullptr) throw InvalidInput("lift_2d_to_25d: missing depth map");
    const auto& depth = *s.depth;
    if (depth.width != cam.width || depth.height != cam.height ||
        s.raw->size() != static_cast<std::size_t>(cam.width) * cam.height) {
      throw InvalidInput("lift_2d_to_25d: depth map, confidence map and camera extents differ");
    }
    for (int r = 0; r < cam.height; ++r) {
      for (int c = 0; c < cam.width; ++c) {
        const double conf = (*s.raw)[static_cast<std::size_t>(r) * cam.width + c];
        if (!(conf > 0.0) || !depth.has_depth(r, c) || depth.at(r, c) > max_depth) continue;
        points.points.push_back(
            {back_project(Vec2(c + 0.5, r + 0.5), depth.at(r, c), camera_frame), std::min(conf, 1.0), label_str});
      }
    }
  }
  auto raw = pool_nonzero_mean(points, domain);
  if (std::none_of(raw.begin(), raw.end(), [](double v) { return v > 0.0; })) {
    throw InvalidInput("lift_2d_to_25d: no confident pixel has depth inside the grid and far plane");
  }
  return softmax_normalize(ConfidenceGrid{domain, std::move(raw), label_str, Task::k25D});
}

SpatialDistribution lift_2d_to_25d(const ConfidenceGrid& raw2d, const DepthMap* depth, const CameraModel& cam,
                                   const VoxelDomain& domain, double max_depth) {
  return lift_samples_to_25d({LiftSample{&raw2d.raw, depth}}, cam, domain, raw2d.label, max_depth);
}

SpatialDistribution vlm_region_distribution(const RegionCounts& counts, const ImageDomain& domain,
                                            std::string_view label) {
  counts.validate();
  domain.validate();
  const std::array<RegionVote, 3> votes{counts.left, counts.center, counts.right};
  const std::array<int, 3> widths{domain.left_margin, domain.width_center, domain.right_margin};

  // Zero-width margins hold no pixels and take no part in the normalization.
  std::vector<double> scores;
  for (int region = 0; region < 3; ++region) {
    if (widths[region] > 0) scores.push_back(static_cast<double>(votes[region].yes) / votes[region].queries);
  }
  const auto mass = softmax(scores);

  const int w = domain.width_full();
  std::vector<double> values(domain.size(), 0.0);
  int col = 0;
  std::size_t active = 0;
  for (int region = 0; region < 3; ++region) {
    if (widths[region] == 0) continue;
    const double per_pixel = mass[active++] / (static_cast<double>(widths[region]) * domain.height);
    for (int r = 0; r < domain.height; ++r) {
      std::fill_n(values.begin() + static_cast<std::ptrdiff_t>(r) * w + col, widths[region], per_pixel);
    }
    col += widths[region];
  }
  return SpatialDistribution{domain, std::move(values), std::string(label), Task::k2D};
}

}  // namespace ssdbench
