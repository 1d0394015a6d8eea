#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "ssdbench/geometry.hpp"
#include "ssdbench/grid.hpp"

namespace ssdbench::cli {

/// Values a flag or the config file may set; unset fields fall through to
/// the next source.
struct Overrides {
  std::optional<double> lambda;
  std::optional<double> tau_conf;
  std::optional<std::array<int, 3>> grid;
  std::optional<double> cell_size;
  std::optional<std::array<int, 3>> image;  // height, centre width, margin
  std::optional<double> max_depth;
  std::optional<int> outlier_neighbors;
  std::optional<double> outlier_sigma;
  std::optional<unsigned> jobs;
  std::optional<std::uint64_t> seed;
};

struct Settings {
  Thresholds thresholds;
  ImageDomain image;
  VoxelDomain voxels_3d = VoxelDomain::centered();
  VoxelDomain voxels_25d = VoxelDomain::frustum();
  double max_depth = kDefaultMaxDepth;
  std::size_t outlier_neighbors = kDefaultOutlierNeighbors;
  double outlier_sigma = kDefaultOutlierSigma;
  unsigned jobs = 1;
  std::uint64_t seed = 0;

  /// The voxel grid evaluated for `task` (3d or 2.5d).
  const VoxelDomain& voxels(Task task) const;
  Domain domain(Task task) const;
};

Overrides read_config(const std::filesystem::path& path);

/// flags > config file > defaults. The config path comes from SSD_BENCH_CONFIG.
Settings resolve_settings(const Overrides& flags);

}  // namespace ssdbench::cli
