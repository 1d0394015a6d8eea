#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ssdbench/aggregate.hpp"
#include "ssdbench/geometry.hpp"
#include "ssdbench/grid.hpp"
#include "ssdbench/groundtruth.hpp"
#include "ssdbench/synth.hpp"

namespace ssdbench::io {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path);
/// Writes through a temporary file and renames it into place.
void write_text(const fs::path& path, const std::string& content);

// Camera: {fx, fy, cx, cy, width, height, R[9] row-major, t[3]}
CameraModel parse_camera(const std::string& text, const std::string& origin);
CameraModel read_camera(const fs::path& path);
std::string format_camera(const CameraModel& cam);

// Cloud: one "x y z confidence label" record per line; '#' starts a comment.
ConfidenceCloud parse_cloud(const std::string& text, const std::string& origin);
ConfidenceCloud read_cloud(const fs::path& path);
std::string format_cloud(const ConfidenceCloud& cloud);

// Detections: JSON lines {image_id, label, bbox:[x0,y0,x1,y1], confidence}.
std::vector<Detection> parse_detections(const std::string& text, const std::string& origin);
std::vector<Detection> read_detections(const fs::path& path);
std::string format_detections(const std::vector<Detection>& detections);

// Distribution: {kind, domain:{...}, label, values:[...]} row-major.
SpatialDistribution parse_distribution(const std::string& text, const std::string& origin);
SpatialDistribution read_distribution(const fs::path& path);
std::string format_distribution(const SpatialDistribution& dist);

/// Dense little-endian grid: "SSDG", u32 version, u32 rank, u32 dims[rank],
/// then f64 values row-major.
struct BinaryGrid {
  std::vector<std::uint32_t> dims;
  std::vector<double> values;
};
std::string encode_grid(const BinaryGrid& grid);
BinaryGrid decode_grid(const std::string& bytes, const std::string& origin);
void write_grid(const fs::path& path, const BinaryGrid& grid);
BinaryGrid read_grid(const fs::path& path);

/// Depth maps are rank-2 grids with dims (height, width).
DepthMap read_depth(const fs::path& path);
void write_depth(const fs::path& path, const DepthMap& depth);

// VLM counts: {left:{yes,queries}, center:{...}, right:{...}}
RegionCounts parse_region_counts(const std::string& text, const std::string& origin);
RegionCounts read_region_counts(const fs::path& path);
std::string format_region_counts(const RegionCounts& counts);

// Scene spec: {scene_id, room:{min,max}, domain?:{type:"voxel",...},
// objects:[{label, center, extent, weight?}]}
SceneSpec parse_scene_spec(const std::string& text, const std::string& origin);
SceneSpec read_scene_spec(const fs::path& path);
std::string format_scene_spec(const SceneSpec& spec);

/// File-name-safe rendering of an object label (spaces and separators -> '_').
std::string label_filename(const std::string& label);

}  // namespace ssdbench::io
