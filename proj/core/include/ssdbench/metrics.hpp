#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "ssdbench/grid.hpp"

namespace ssdbench {

inline constexpr double kCrossEntropyFloor = 1e-12;
inline constexpr std::array<int, 4> kDefaultKernelSizes{3, 5, 7, 10};

/// -sum d log d / log|X|, with 0 log 0 = 0. Needs at least two cells.
double entropy(const SpatialDistribution& d);

/// -sum g log max(d, 1e-12) / log|X|. Both distributions must share a domain.
double cross_entropy(const SpatialDistribution& g, const SpatialDistribution& d);

using CellIndex = std::array<int, 3>;

/// Local maxima of a thresholded distribution, ascending by flat index.
struct PeakSet {
  GridShape shape;
  std::vector<CellIndex> cells;

  bool empty() const { return cells.empty(); }
  std::size_t size() const { return cells.size(); }
};

/// Moore-window local maxima after thresholding at tau (cells <= tau are
/// zeroed). For a kernel of size s the window spans offsets
/// [-(s/2), s-1-(s/2)] on every axis, so even sizes are asymmetric. A cell is
/// a peak when its value exceeds tau and equals the window maximum; plateaus
/// keep every cell. The result is the union over all kernel sizes.
PeakSet find_peaks(const SpatialDistribution& dist, const Thresholds& thr,
                   std::span<const int> kernel_sizes = kDefaultKernelSizes);

/// Single-kernel variant of find_peaks.
PeakSet find_peaks_single(const SpatialDistribution& dist, const Thresholds& thr, int kernel_size);

/// Mean distance from each ground-truth peak to its nearest predicted peak,
/// normalized by the grid diameter. +inf when `predicted` is empty.
double nn_distance(const PeakSet& truth, const PeakSet& predicted);

/// Axis-aligned block of an image domain: rows [row_begin, row_end),
/// columns [col_begin, col_end).
struct Region {
  int row_begin = 0;
  int row_end = 0;
  int col_begin = 0;
  int col_end = 0;
};

/// Left margin, centre crop, right margin (full height each).
std::vector<Region> standard_regions(const ImageDomain& domain);

/// Per-region detection labels: whether any cell of the region exceeds the
/// global tau = lambda / |X|.
std::vector<bool> region_labels(const SpatialDistribution& dist, const Thresholds& thr,
                                const std::vector<Region>& regions);

/// Fraction of regions where the predicted label matches the ground truth.
/// Regions must partition the image domain.
double region_accuracy(const SpatialDistribution& g, const SpatialDistribution& d, const Thresholds& thr,
                       const std::vector<Region>& regions);

struct PairMetrics {
  double h_cross = 0.0;
  double h = 0.0;
  /// Absent when the thresholded ground truth is empty (y = 0).
  std::optional<double> delta;
  bool y = false;
  bool y_hat = false;
  /// 2D only.
  std::optional<double> region_accuracy;
};

/// All per-pair metrics of prediction `d` against ground truth `g`.
PairMetrics evaluate_pair(const SpatialDistribution& g, const SpatialDistribution& d, const Thresholds& thr,
                          std::span<const int> kernel_sizes = kDefaultKernelSizes);

/// sum y (1 - y_hat) / sum y. Throws UndefinedMetric when no pair has y = 1.
double fnr(std::span<const PairMetrics> pairs);

}  // namespace ssdbench
