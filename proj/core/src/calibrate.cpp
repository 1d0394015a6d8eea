#include "ssdbench/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "ssdbench/errors.hpp"
#include "ssdbench/report.hpp"

namespace ssdbench {

std::vector<double> linspace_step(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw InvalidInput("range needs lo <= hi and a positive step");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

RetentionCurve retention_curve(std::span<const SpatialDistribution> grids, std::span<const double> lambdas) {
  if (grids.empty()) throw InvalidInput("retention_curve: empty corpus");
  if (!std::is_sorted(lambdas.begin(), lambdas.end())) throw InvalidInput("retention_curve: lambdas must ascend");

  RetentionCurve curve;
  curve.points.reserve(lambdas.size());
  // Sorting each grid once turns every query into a binary search.
  std::vector<std::vector<double>> sorted;
  sorted.reserve(grids.size());
  for (const auto& g : grids) {
    auto v = g.values;
    std::sort(v.begin(), v.end());
    sorted.push_back(std::move(v));
  }
  for (const double lambda : lambdas) {
    double sum = 0.0;
    for (const auto& v : sorted) {
      const double tau = lambda / static_cast<double>(v.size());
      const auto above = v.end() - std::upper_bound(v.begin(), v.end(), tau);
      sum += 100.0 * static_cast<double>(above) / static_cast<double>(v.size());
    }
    curve.points.push_back({lambda, sum / static_cast<double>(sorted.size())});
  }
  return curve;
}

double knee(const RetentionCurve& curve) {
  const auto& p = curve.points;
  if (p.size() < 3) throw InvalidInput("knee: need at least three curve points");

  double max_slope = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double dx = p[i + 1].lambda - p[i].lambda;
    if (!(dx > 0.0)) throw InvalidInput("knee: lambdas must strictly ascend");
    max_slope = std::max(max_slope, std::abs((p[i + 1].retention - p[i].retention) / dx));
  }

  double best = 0.0;
  std::size_t best_i = 0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double left = (p[i].retention - p[i - 1].retention) / (p[i].lambda - p[i - 1].lambda);
    const double right = (p[i + 1].retention - p[i].retention) / (p[i + 1].lambda - p[i].lambda);
    const double curvature = 2.0 * (right - left) / (p[i + 1].lambda - p[i - 1].lambda);
    if (curvature > best) {
      best = curvature;
      best_i = i;
    }
  }
  // Straight or concave-only curves have no elbow.
  if (best_i == 0 || best <= 1e-9 * max_slope) throw NoKnee("retention curve has no knee");
  return p[best_i].lambda;
}

std::vector<BoxRate> bbox_rate_curve(std::span<const PosedFrame> frames, std::span<const double> thresholds) {
  if (frames.empty()) throw InvalidInput("bbox_rate_curve: no frames");
  std::vector<BoxRate> out;
  out.reserve(thresholds.size());
  std::vector<double> counts(frames.size());
  for (const double t : thresholds) {
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const auto& dets = frames[f].detections;
      counts[f] = static_cast<double>(
          std::count_if(dets.begin(), dets.end(), [t](const Detection& d) { return d.confidence >= t; }));
    }
    const auto s = summarize(counts);
    out.push_back({t, s.mean, s.stddev});
  }
  return out;
}

}  // namespace ssdbench
