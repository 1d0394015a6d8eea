#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssdbench/aggregate.hpp"
#include "ssdbench/geometry.hpp"
#include "ssdbench/groundtruth.hpp"
#include "ssdbench/synth.hpp"

namespace ssdbench {

namespace fs = std::filesystem;

struct FrameRef {
  std::string image_id;
  fs::path camera;
  fs::path detections;
  std::optional<fs::path> depth;
};

/// Scene description. Relative paths resolve against the manifest's directory.
struct SceneManifest {
  std::string scene_id;
  std::vector<FrameRef> frames;
  std::string input_frame;
  fs::path reconstruction;
  std::vector<std::string> objects;
};

SceneManifest load_manifest(const fs::path& path);

struct LoadedScene {
  SceneManifest manifest;
  std::vector<PosedFrame> frames;
  ConfidenceCloud reconstruction;

  const PosedFrame& input_frame() const;
};

LoadedScene load_scene(const SceneManifest& manifest);

/// Generated samples of one scene, read from
/// <root>/scene/<id>/samples/<n>/pose<k>.{detections.jsonl,cloud.txt,depth.bin}
/// plus the input camera <root>/scene/<id>/camera.json and VLM counts
/// <root>/scene/<id>/vlm/<label>.json.
struct SamplePose {
  int pose = 1;
  std::optional<fs::path> detections;
  std::optional<fs::path> cloud;
  std::optional<fs::path> depth;
};

struct SampleDir {
  int index = 0;
  std::vector<SamplePose> poses;  // ascending pose number
};

struct SampleScene {
  std::string scene_id;
  fs::path dir;
  std::optional<fs::path> camera;
  std::vector<SampleDir> samples;  // ascending sample number
  std::map<std::string, fs::path> vlm_counts;
};

/// All scenes under <root>/scene, sorted by id.
std::vector<SampleScene> scan_samples(const fs::path& root);

/// Clouds of every pose of every sample, in (sample, pose) order.
std::vector<ConfidenceCloud> load_cloud_samples(const SampleScene& scene);

/// pose1 detections of every sample; depth maps when every sample has one.
struct ImageSamples {
  std::vector<std::vector<Detection>> detections;
  std::vector<DepthMap> depths;
};
ImageSamples load_image_samples(const SampleScene& scene);

/// VLM counts keyed by object label (the file's "label" field, else its stem).
std::map<std::string, RegionCounts> load_vlm_counts(const SampleScene& scene);

/// Writes synthetic samples in the layout scan_samples reads.
void write_synthetic_samples(const fs::path& root, const std::string& scene_id, const CameraModel& cam,
                             const std::vector<SyntheticSample>& samples);

}  // namespace ssdbench
