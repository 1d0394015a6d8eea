#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ssdbench/geometry.hpp"

namespace ssdbench {

enum class Task { k2D, k25D, k3D };

std::string_view to_string(Task task);
/// Accepts "2d", "2.5d", "3d". Throws InvalidInput otherwise.
Task parse_task(std::string_view text);

/// Expanded pixel grid: an H x W center crop widened by left/right margins
/// to H x W'. Row-major, (row, col).
struct ImageDomain {
  int height = 360;
  int width_center = 360;
  int left_margin = 140;
  int right_margin = 140;

  int width_full() const { return width_center + left_margin + right_margin; }
  std::size_t size() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width_full());
  }
  void validate() const;
  bool operator==(const ImageDomain&) const = default;
};

/// Camera-anchored voxel grid. A camera-frame point p falls in cell
/// floor(p / cell_size + camera_anchor). Cells are indexed (x, y, z) row-major.
struct VoxelDomain {
  std::array<int, 3> resolution{20, 20, 20};
  double cell_size = 1.0;
  /// Position of the camera centre in continuous cell coordinates.
  std::array<double, 3> camera_anchor{10.0, 10.0, 10.0};

  /// 3D task grid: camera at the grid centre.
  static VoxelDomain centered(std::array<int, 3> resolution = {20, 20, 20}, double cell_size = 1.0);
  /// 2.5D task grid: camera 5 scene units behind the grid centre along +z.
  static VoxelDomain frustum(std::array<int, 3> resolution = {10, 10, 10}, double cell_size = 1.0);

  std::size_t size() const {
    return static_cast<std::size_t>(resolution[0]) * static_cast<std::size_t>(resolution[1]) *
           static_cast<std::size_t>(resolution[2]);
  }
  /// Flat cell index of a camera-frame point, or std::nullopt outside the grid.
  std::optional<std::size_t> cell_of(const Vec3& camera_point) const;
  void validate() const;
  bool operator==(const VoxelDomain&) const = default;
};

using Domain = std::variant<ImageDomain, VoxelDomain>;

/// Logical extent of a grid as three axes; 2D grids use a trailing extent of 1.
struct GridShape {
  int rank = 3;
  std::array<int, 3> extent{1, 1, 1};

  std::size_t size() const {
    return static_cast<std::size_t>(extent[0]) * static_cast<std::size_t>(extent[1]) *
           static_cast<std::size_t>(extent[2]);
  }
  std::size_t flat(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(extent[1]) +
            static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(extent[2]) +
           static_cast<std::size_t>(k);
  }
  std::array<int, 3> unflatten(std::size_t index) const;
  /// Distance between the extreme cell centres, in cell units.
  double diameter() const;
  bool operator==(const GridShape&) const = default;
};

GridShape shape_of(const Domain& domain);
std::size_t domain_size(const Domain& domain);
void validate_domain(const Domain& domain);

/// Pre-softmax per-cell confidences over a domain.
struct ConfidenceGrid {
  Domain domain;
  std::vector<double> raw;
  std::string label;
  Task kind = Task::k2D;
};

/// Normalized probability grid over a domain for one object label.
struct SpatialDistribution {
  Domain domain;
  std::vector<double> values;
  std::string label;
  Task kind = Task::k2D;

  std::size_t size() const { return values.size(); }
  GridShape shape() const { return shape_of(domain); }
  /// Throws InvalidInput unless values are non-negative, sized to the domain
  /// and sum to 1 within `tol`.
  void validate(double tol = 1e-9) const;
};

/// Detection thresholds. tau = lambda / |X|.
struct Thresholds {
  double lambda = 1.4;
  double tau_conf = 0.1;

  double tau(std::size_t cells) const { return lambda / static_cast<double>(cells); }
  void validate() const;
};

/// exp(r_i - max r) / sum_j exp(r_j - max r). Throws on empty or non-finite input.
std::vector<double> softmax(std::span<const double> raw);

SpatialDistribution softmax_normalize(const ConfidenceGrid& grid);

/// Indices of cells with value strictly greater than tau, ascending.
std::vector<std::size_t> threshold(const SpatialDistribution& dist, const Thresholds& thr);

inline bool detection_label(std::span<const std::size_t> thresholded) {
  return !thresholded.empty();
}

/// Averages the non-zero confidences of the points falling in each voxel.
/// Points are expected in the camera frame the domain is anchored to; points
/// outside the grid are dropped. When `label` is non-empty only points with
/// that label contribute. The per-voxel sum runs over the sorted confidences,
/// so the result does not depend on the input order.
std::vector<double> pool_nonzero_mean(const ConfidenceCloud& camera_cloud,
                                      const VoxelDomain& domain,
                                      std::string_view label = {});

}  // namespace ssdbench
