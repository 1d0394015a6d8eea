#pragma once

#include <span>
#include <vector>

#include "ssdbench/grid.hpp"
#include "ssdbench/groundtruth.hpp"

namespace ssdbench {

struct RetentionPoint {
  double lambda = 0.0;
  /// Percent of cells above lambda / |X|, averaged over the corpus.
  double retention = 0.0;
};

struct RetentionCurve {
  std::vector<RetentionPoint> points;
};

/// Evenly spaced values lo, lo+step, ..., up to hi (inclusive within half a step).
std::vector<double> linspace_step(double lo, double hi, double step);

RetentionCurve retention_curve(std::span<const SpatialDistribution> grids, std::span<const double> lambdas);

/// Lambda at the largest discrete curvature of the curve (slope change
/// between neighbouring segments, spacing-aware), ties to the smaller lambda.
/// Throws NoKnee when the curve is straight.
double knee(const RetentionCurve& curve);

struct BoxRate {
  double threshold = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};

/// Mean and population std of the per-frame count of detections with
/// confidence >= threshold.
std::vector<BoxRate> bbox_rate_curve(std::span<const PosedFrame> frames, std::span<const double> thresholds);

}  // namespace ssdbench
