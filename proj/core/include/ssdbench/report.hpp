#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssdbench/grid.hpp"
#include "ssdbench/metrics.hpp"

namespace ssdbench {

struct PairRecord {
  std::string scene_id;
  std::string label;
  PairMetrics metrics;
};

/// Mean and population standard deviation over `count` values.
struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

Summary summarize(std::span<const double> values);

/// Dataset-level aggregate for one method and task.
struct MetricReport {
  std::string method;
  Task task = Task::k2D;
  std::size_t pairs = 0;
  Summary h_cross;
  Summary h;
  /// Finite distances only.
  Summary delta;
  std::size_t delta_infinite = 0;
  /// Pairs with an empty thresholded ground truth have no distance.
  std::size_t delta_not_applicable = 0;
  std::size_t positives = 0;
  std::optional<double> fnr;
  std::optional<Summary> region_accuracy;
  /// Sorted by (scene_id, label).
  std::vector<PairRecord> records;
};

MetricReport aggregate_report(std::vector<PairRecord> records, std::string method, Task task);

/// Pretty-printed JSON. Infinite distances are written as the string "inf".
std::string report_to_json(const MetricReport& report, const std::string& generated_by);
std::string pairs_to_json(const MetricReport& report);

/// Column-aligned CSV, one row per report: H-cross, H, Delta (x100), FNR, A.
std::string reports_to_csv(std::span<const MetricReport> reports);

}  // namespace ssdbench
