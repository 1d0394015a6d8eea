#include "settings.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <thread>

#include <json.hpp>

#include "ssdbench/errors.hpp"
#include "ssdbench/io.hpp"

namespace ssdbench::cli {

using nlohmann::json;

const VoxelDomain& Settings::voxels(Task task) const {
  if (task == Task::k3D) return voxels_3d;
  if (task == Task::k25D) return voxels_25d;
  throw InvalidInput("the 2d task has no voxel grid");
}

Domain Settings::domain(Task task) const {
  if (task == Task::k2D) return image;
  return voxels(task);
}

Overrides read_config(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ParseError(path.string(), static_cast<std::size_t>(line), e.what());
  }
  if (!j.is_object()) throw ParseError(path.string(), 1, "config must be a JSON object");

  static const std::set<std::string> known = {"lambda",    "tau_conf",          "grid",          "cell_size",
                                              "image",     "max_depth",         "outlier_neighbors",
                                              "outlier_sigma", "jobs",          "seed"};
  Overrides o;
  try {
    for (const auto& [key, value] : j.items()) {
      if (!known.count(key)) throw ParseError(path.string(), 1, "unknown config key '" + key + "'");
    }
    if (j.contains("lambda")) o.lambda = j["lambda"].get<double>();
    if (j.contains("tau_conf")) o.tau_conf = j["tau_conf"].get<double>();
    if (j.contains("grid")) o.grid = j["grid"].get<std::array<int, 3>>();
    if (j.contains("cell_size")) o.cell_size = j["cell_size"].get<double>();
    if (j.contains("image")) o.image = j["image"].get<std::array<int, 3>>();
    if (j.contains("max_depth")) o.max_depth = j["max_depth"].get<double>();
    if (j.contains("outlier_neighbors")) o.outlier_neighbors = j["outlier_neighbors"].get<int>();
    if (j.contains("outlier_sigma")) o.outlier_sigma = j["outlier_sigma"].get<double>();
    if (j.contains("jobs")) o.jobs = j["jobs"].get<unsigned>();
    if (j.contains("seed")) o.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 1, e.what());
  }
  return o;
}

namespace {

template <class T>
std::optional<T> pick(const std::optional<T>& flag, const std::optional<T>& config) {
  return flag ? flag : config;
}

}  // namespace

Settings resolve_settings(const Overrides& flags) {
  Overrides config;
  if (const char* env = std::getenv("SSD_BENCH_CONFIG"); env && *env) config = read_config(env);

  Settings s;
  s.jobs = std::max(1u, std::thread::hardware_concurrency());
  if (auto v = pick(flags.lambda, config.lambda)) s.thresholds.lambda = *v;
  if (auto v = pick(flags.tau_conf, config.tau_conf)) s.thresholds.tau_conf = *v;
  s.thresholds.validate();

  const double cell = pick(flags.cell_size, config.cell_size).value_or(1.0);
  if (auto g = pick(flags.grid, config.grid)) {
    s.voxels_3d = VoxelDomain::centered(*g, cell);
    s.voxels_25d = VoxelDomain::frustum(*g, cell);
  } else {
    s.voxels_3d = VoxelDomain::centered(s.voxels_3d.resolution, cell);
    s.voxels_25d = VoxelDomain::frustum(s.voxels_25d.resolution, cell);
  }
  s.voxels_3d.validate();
  s.voxels_25d.validate();

  if (auto im = pick(flags.image, config.image)) {
    s.image = ImageDomain{(*im)[0], (*im)[1], (*im)[2], (*im)[2]};
  }
  s.image.validate();

  if (auto v = pick(flags.max_depth, config.max_depth)) s.max_depth = *v;
  if (!(s.max_depth > 0.0)) throw InvalidInput("max depth must be positive");
  if (auto v = pick(flags.outlier_neighbors, config.outlier_neighbors)) {
    if (*v < 1) throw InvalidInput("outlier neighbours must be at least 1");
    s.outlier_neighbors = static_cast<std::size_t>(*v);
  }
  if (auto v = pick(flags.outlier_sigma, config.outlier_sigma)) s.outlier_sigma = *v;
  if (auto v = pick(flags.jobs, config.jobs)) s.jobs = std::max(1u, *v);
  if (auto v = pick(flags.seed, config.seed)) s.seed = *v;
  return s;
}

}  // namespace ssdbench::cli
