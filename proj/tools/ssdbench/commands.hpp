#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "settings.hpp"

namespace ssdbench::cli {

namespace fs = std::filesystem;

struct BuildGtArgs {
  std::vector<fs::path> manifests;
  Task task = Task::k2D;
  fs::path out;
};

struct AggregateArgs {
  fs::path samples;
  std::string pipeline;  // dfm3d | sdxl2d | vlm
  Task task = Task::k3D;
  std::vector<std::string> labels;  // empty: every label found in the samples
  fs::path out;
};

struct EvaluateArgs {
  fs::path gt;
  std::optional<fs::path> pred;
  std::optional<std::string> predictor;  // uniform | oracle
  std::string method;
  Task task = Task::k2D;
  fs::path out;
};

struct RetentionArgs {
  std::vector<fs::path> inputs;  // distribution files or directories of them
  std::string lambdas = "1.0:3.0:0.05";
  fs::path out;
};

struct ConfArgs {
  std::vector<fs::path> manifests;
  std::string thresholds = "0.0:1.0:0.05";
  fs::path out;
};

struct SynthArgs {
  fs::path spec;
  std::size_t samples = 200;
  double noise = 0.05;
  double miss_rate = 0.0;
  fs::path out;
};

// Each command returns the process exit code; errors propagate as exceptions.
int build_gt(const BuildGtArgs& args, const Settings& settings);
int aggregate(const AggregateArgs& args, const Settings& settings);
int evaluate(const EvaluateArgs& args, const Settings& settings);
int calibrate_retention(const RetentionArgs& args, const Settings& settings);
int calibrate_conf(const ConfArgs& args, const Settings& settings);
int synth(const SynthArgs& args, const Settings& settings);

/// "lo:hi:step" -> inclusive grid.
std::vector<double> parse_range(const std::string& text);

}  // namespace ssdbench::cli
