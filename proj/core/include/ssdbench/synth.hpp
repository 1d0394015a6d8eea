#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ssdbench/geometry.hpp"
#include "ssdbench/grid.hpp"
#include "ssdbench/groundtruth.hpp"
#include "ssdbench/metrics.hpp"

namespace ssdbench {

/// One mixture component: an object of `label` appears uniformly inside the
/// box (center, extent) with relative weight `weight` among components of
/// the same label.
struct SyntheticObject {
  std::string label;
  Vec3 center = Vec3::Zero();
  Vec3 extent = Vec3::Ones();
  double weight = 1.0;
};

/// Scene authored in the input-camera frame (camera at the origin looking
/// down +z).
struct SceneSpec {
  std::string scene_id = "synth";
  Vec3 room_min{-10.0, -10.0, -10.0};
  Vec3 room_max{10.0, 10.0, 10.0};
  std::vector<SyntheticObject> objects;
  VoxelDomain domain = VoxelDomain::centered();
};

struct SyntheticScene {
  SceneSpec spec;
  std::uint64_t seed = 0;
  /// Exact voxel integral of each label's mixture, renormalized over the grid.
  std::map<std::string, SpatialDistribution> analytic;

  std::vector<std::string> labels() const;
  const SpatialDistribution& analytic_ssd(const std::string& label) const;
};

/// Validates the scene spec and integrates every mixture over the voxel grid.
/// Throws InvalidSpec for objects outside the room, non-positive extents or
/// weights, or a label with no mass inside the grid.
SyntheticScene make_scene(const SceneSpec& spec, std::uint64_t seed);

/// Random axis-aligned components inside the room, deterministic per seed.
SceneSpec random_scene_spec(const std::vector<std::string>& labels, int components_per_label,
                            const VoxelDomain& domain, std::uint64_t seed);

struct SimulatedSampler {
  const SyntheticScene* scene = nullptr;
  /// Std of the Gaussian jitter; confidence = clamp(1 - |jitter|, 0, 1).
  double detection_noise = 0.05;
  /// Probability that a visible instance yields no detection.
  double miss_rate = 0.0;
  std::uint64_t seed = 0;
  /// Edge length of the cube each instance is rendered as.
  double instance_size = 0.3;
  int surface_points = 48;

  void validate() const;
};

struct PlacedInstance {
  std::string label;
  Vec3 position = Vec3::Zero();
  double confidence = 0.0;
  bool detected = false;
};

/// One simulated generative sample.
struct SyntheticSample {
  std::vector<Detection> detections;
  /// Surface points of every instance in the camera frame; missed instances
  /// carry confidence 0.
  ConfidenceCloud cloud;
  std::vector<PlacedInstance> instances;
};

/// Draw `draw_index` of the sampler; bit-identical for equal (seed, index).
SyntheticSample draw_sample(const SimulatedSampler& sampler, const CameraModel& cam, std::uint64_t draw_index);
std::vector<SyntheticSample> draw_samples(const SimulatedSampler& sampler, const CameraModel& cam,
                                          std::size_t count);

/// Pinhole camera over an expanded image domain with a 90 degree horizontal
/// field of view across the centre crop.
CameraModel synthetic_camera(const ImageDomain& domain = {});

/// Normalized voxel histogram of instance positions for one label.
std::vector<double> instance_histogram(const std::vector<SyntheticSample>& samples, const VoxelDomain& domain,
                                       const std::string& label);

double total_variation(std::span<const double> a, std::span<const double> b);

/// Metrics of `predicted` against the scene's analytic distribution.
PairMetrics analytic_metrics(const SyntheticScene& scene, const SpatialDistribution& predicted,
                             const Thresholds& thr = {});

}  // namespace ssdbench
