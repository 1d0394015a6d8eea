#include "ssdbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace ssdbench {

using nlohmann::ordered_json;

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (const double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double var = 0.0;
  for (const double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

MetricReport aggregate_report(std::vector<PairRecord> records, std::string method, Task task) {
  std::sort(records.begin(), records.end(), [](const PairRecord& a, const PairRecord& b) {
    return std::tie(a.scene_id, a.label) < std::tie(b.scene_id, b.label);
  });

  MetricReport r;
  r.method = std::move(method);
  r.task = task;
  r.pairs = records.size();

  std::vector<double> hx, h, delta, acc;
  std::size_t misses = 0;
  for (const auto& rec : records) {
    const auto& m = rec.metrics;
    hx.push_back(m.h_cross);
    h.push_back(m.h);
    if (!m.delta) {
      ++r.delta_not_applicable;
    } else if (std::isinf(*m.delta)) {
      ++r.delta_infinite;
    } else {
      delta.push_back(*m.delta);
    }
    if (m.y) {
      ++r.positives;
      if (!m.y_hat) ++misses;
    }
    if (m.region_accuracy) acc.push_back(*m.region_accuracy);
  }
  r.h_cross = summarize(hx);
  r.h = summarize(h);
  r.delta = summarize(delta);
  if (r.positives > 0) r.fnr = static_cast<double>(misses) / static_cast<double>(r.positives);
  if (!acc.empty()) r.region_accuracy = summarize(acc);
  r.records = std::move(records);
  return r;
}

namespace {

ordered_json summary_json(const Summary& s) {
  return ordered_json{{"count", s.count}, {"mean", s.mean}, {"std", s.stddev}};
}

ordered_json delta_json(const std::optional<double>& d) {
  if (!d) return nullptr;
  if (std::isinf(*d)) return "inf";
  return *d;
}

ordered_json pair_json(const PairRecord& rec) {
  const auto& m = rec.metrics;
  ordered_json j{{"scene_id", rec.scene_id},
                 {"label", rec.label},
                 {"h_cross", m.h_cross},
                 {"h", m.h},
                 {"delta", delta_json(m.delta)},
                 {"y", m.y ? 1 : 0},
                 {"y_hat", m.y_hat ? 1 : 0}};
  j["region_accuracy"] = m.region_accuracy ? ordered_json(*m.region_accuracy) : ordered_json(nullptr);
  return j;
}

std::string fixed(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string report_to_json(const MetricReport& report, const std::string& generated_by) {
  ordered_json j;
  j["method"] = report.method;
  j["task"] = std::string(to_string(report.task));
  j["pairs"] = report.pairs;
  j["h_cross"] = summary_json(report.h_cross);
  j["h"] = summary_json(report.h);
  auto delta = summary_json(report.delta);
  if (report.delta.count == 0) {
    delta["mean"] = report.delta_infinite > 0 ? ordered_json("inf") : ordered_json(nullptr);
    delta["std"] = nullptr;
  }
  delta["excluded_infinite"] = report.delta_infinite;
  delta["not_applicable"] = report.delta_not_applicable;
  j["delta"] = delta;
  j["positives"] = report.positives;
  j["fnr"] = report.fnr ? ordered_json(*report.fnr) : ordered_json(nullptr);
  j["region_accuracy"] = report.region_accuracy ? summary_json(*report.region_accuracy) : ordered_json(nullptr);
  j["metadata"] = ordered_json{{"generated_by", generated_by}};
  return j.dump(2) + "\n";
}

std::string pairs_to_json(const MetricReport& report) {
  ordered_json arr = ordered_json::array();
  for (const auto& rec : report.records) arr.push_back(pair_json(rec));
  return arr.dump(2) + "\n";
}

std::string reports_to_csv(std::span<const MetricReport> reports) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"method", "task", "pairs", "h_cross", "h_cross_std", "h", "h_std", "delta_pct",
                  "delta_pct_std", "delta_inf", "fnr", "accuracy", "accuracy_std"});
  for (const auto& r : reports) {
    std::string dmean = "n/a";
    std::string dstd = "n/a";
    if (r.delta.count > 0) {
      dmean = fixed(100.0 * r.delta.mean);
      dstd = fixed(100.0 * r.delta.stddev);
    } else if (r.delta_infinite > 0) {
      dmean = "inf";
    }
    rows.push_back({r.method, std::string(to_string(r.task)), std::to_string(r.pairs), fixed(r.h_cross.mean),
                    fixed(r.h_cross.stddev), fixed(r.h.mean), fixed(r.h.stddev), dmean, dstd,
                    std::to_string(r.delta_infinite), r.fnr ? fixed(*r.fnr) : "n/a",
                    r.region_accuracy ? fixed(r.region_accuracy->mean) : "n/a",
                    r.region_accuracy ? fixed(r.region_accuracy->stddev) : "n/a"});
  }

  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      if (c + 1 < row.size()) out << ',' << std::string(width[c] - row[c].size() + 1, ' ');
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace ssdbench
