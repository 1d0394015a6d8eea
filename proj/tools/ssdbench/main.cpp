#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "settings.hpp"
#include "ssdbench/errors.hpp"

namespace {

using namespace ssdbench;
using namespace ssdbench::cli;

struct FlagValues {
  Overrides o;
  std::vector<int> grid;
  std::vector<int> image;
  std::string task;
};

void add_common(CLI::App* cmd, FlagValues& f) {
  cmd->add_option_function<double>("--lambda", [&](double v) { f.o.lambda = v; }, "Threshold multiplier lambda");
  cmd->add_option_function<double>("--tau-conf", [&](double v) { f.o.tau_conf = v; }, "Detector confidence cut");
  cmd->add_option("--grid", f.grid, "Voxel resolution nx,ny,nz")->delimiter(',')->expected(3);
  cmd->add_option_function<double>("--cell-size", [&](double v) { f.o.cell_size = v; }, "Voxel edge length");
  cmd->add_option("--image", f.image, "Expanded image H,W,margin")->delimiter(',')->expected(3);
  cmd->add_option_function<double>("--max-depth", [&](double v) { f.o.max_depth = v; }, "Far plane");
  cmd->add_option_function<unsigned>("--jobs", [&](unsigned v) { f.o.jobs = v; }, "Worker threads");
  cmd->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { f.o.seed = v; }, "Random seed");
}

void add_task(CLI::App* cmd, FlagValues& f) {
  cmd->add_option("--task", f.task, "2d, 2.5d or 3d")->required()->check(CLI::IsMember({"2d", "2.5d", "3d"}));
}

Settings settings_from(FlagValues& f) {
  if (f.grid.size() == 3) f.o.grid = std::array<int, 3>{f.grid[0], f.grid[1], f.grid[2]};
  if (f.image.size() == 3) f.o.image = std::array<int, 3>{f.image[0], f.image[1], f.image[2]};
  return resolve_settings(f.o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark toolkit for spatio-semantic distributions"};
  app.set_version_flag("--version", std::string("ssdbench ") + SSDBENCH_VERSION);
  app.require_subcommand(1);
  FlagValues flags;
  int status = 0;

  BuildGtArgs gt_args;
  auto* build = app.add_subcommand("build-gt", "Ground-truth distributions from scene manifests");
  build->add_option("manifests", gt_args.manifests, "Scene manifest files")->required()->check(CLI::ExistingFile);
  build->add_option("--out", gt_args.out, "Output directory")->required();
  add_task(build, flags);
  add_common(build, flags);

  AggregateArgs agg_args;
  auto* agg = app.add_subcommand("aggregate", "Predicted distributions from generated samples");
  agg->add_option("--samples", agg_args.samples, "Samples root")->required()->check(CLI::ExistingDirectory);
  agg->add_option("--pipeline", agg_args.pipeline, "dfm3d, sdxl2d or vlm")
      ->required()
      ->check(CLI::IsMember({"dfm3d", "sdxl2d", "vlm"}));
  agg->add_option("--labels", agg_args.labels, "Object labels (default: all found)")->delimiter(',');
  agg->add_option("--out", agg_args.out, "Output directory")->required();
  add_task(agg, flags);
  add_common(agg, flags);

  EvaluateArgs eval_args;
  std::string pred_dir;
  std::string predictor;
  auto* eval = app.add_subcommand("evaluate", "Score predictions against ground truth");
  eval->add_option("--gt", eval_args.gt, "Ground-truth directory")->required()->check(CLI::ExistingDirectory);
  auto* pred_opt = eval->add_option("--pred", pred_dir, "Prediction directory")->check(CLI::ExistingDirectory);
  auto* predictor_opt = eval->add_option("--predictor", predictor, "Baseline predictor")
                            ->check(CLI::IsMember({"uniform", "oracle"}));
  pred_opt->excludes(predictor_opt);
  eval->add_option("--method", eval_args.method, "Method name in the report");
  eval->add_option("--out", eval_args.out, "Output directory")->required();
  add_task(eval, flags);
  add_common(eval, flags);

  auto* cal = app.add_subcommand("calibrate", "Hyperparameter calibration curves");
  cal->require_subcommand(1);
  RetentionArgs ret_args;
  auto* ret = cal->add_subcommand("retention", "Retention rate against lambda and its knee");
  ret->add_option("inputs", ret_args.inputs, "Distribution files or directories")->required();
  ret->add_option("--lambdas", ret_args.lambdas, "lo:hi:step")->capture_default_str();
  ret->add_option("--out", ret_args.out, "Output directory")->required();
  add_common(ret, flags);
  ConfArgs conf_args;
  auto* conf = cal->add_subcommand("conf", "Boxes per frame against detector confidence");
  conf->add_option("manifests", conf_args.manifests, "Scene manifest files")->required()->check(CLI::ExistingFile);
  conf->add_option("--thresholds", conf_args.thresholds, "lo:hi:step")->capture_default_str();
  conf->add_option("--out", conf_args.out, "Output directory")->required();
  add_common(conf, flags);

  SynthArgs synth_args;
  auto* syn = app.add_subcommand("synth", "Synthetic scene, simulated samples and analytic ground truth");
  syn->add_option("--spec", synth_args.spec, "Scene spec JSON")->required()->check(CLI::ExistingFile);
  syn->add_option("--samples", synth_args.samples, "Number of samples")->capture_default_str();
  syn->add_option("--noise", synth_args.noise, "Detection confidence jitter std")->capture_default_str();
  syn->add_option("--miss-rate", synth_args.miss_rate, "Probability of a missed detection")->capture_default_str();
  syn->add_option("--out", synth_args.out, "Output directory")->required();
  add_common(syn, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    const Settings settings = settings_from(flags);
    const Task task = flags.task.empty() ? Task::k3D : parse_task(flags.task);
    if (build->parsed()) {
      gt_args.task = task;
      status = build_gt(gt_args, settings);
    } else if (agg->parsed()) {
      agg_args.task = task;
      status = aggregate(agg_args, settings);
    } else if (eval->parsed()) {
      eval_args.task = task;
      if (!pred_dir.empty()) eval_args.pred = pred_dir;
      if (!predictor.empty()) eval_args.predictor = predictor;
      status = evaluate(eval_args, settings);
    } else if (ret->parsed()) {
      status = calibrate_retention(ret_args, settings);
    } else if (conf->parsed()) {
      status = calibrate_conf(conf_args, settings);
    } else if (syn->parsed()) {
      status = synth(synth_args, settings);
    }
  } catch (const std::exception& e) {
    std::cerr << "ssdbench: error: " << e.what() << "\n";
    return 1;
  }
  return status;
}
