#include "ssdbench/dataset.hpp"

#include <algorithm>
#include <charconv>

#include <json.hpp>

#include "ssdbench/errors.hpp"
#include "ssdbench/io.hpp"

namespace ssdbench {

using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
  const std::string text = io::read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ParseError(path.string(), static_cast<std::size_t>(line), e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& rel) {
  const fs::path p(rel);
  return p.is_absolute() ? p : base / p;
}

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw IoError("missing file " + p.string());
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

SceneManifest load_manifest(const fs::path& path) {
  const json j = read_json(path);
  const fs::path base = path.parent_path();
  SceneManifest m;
  try {
    m.scene_id = j.at("scene_id").get<std::string>();
    for (const auto& f : j.at("frames")) {
      FrameRef ref;
      ref.image_id = f.at("image_id").get<std::string>();
      ref.camera = resolve(base, f.at("camera").get<std::string>());
      ref.detections = resolve(base, f.at("detections").get<std::string>());
      if (f.contains("depth") && !f["depth"].is_null()) ref.depth = resolve(base, f["depth"].get<std::string>());
      m.frames.push_back(std::move(ref));
    }
    m.input_frame = j.at("input_frame").get<std::string>();
    m.reconstruction = resolve(base, j.at("reconstruction").get<std::string>());
    m.objects = j.at("objects").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 1, e.what());
  }

  const bool has_input = std::any_of(m.frames.begin(), m.frames.end(),
                                     [&](const FrameRef& f) { return f.image_id == m.input_frame; });
  if (!has_input) throw InvalidInput(path.string() + ": input frame '" + m.input_frame + "' is not listed");
  for (const auto& f : m.frames) {
    require_file(f.camera);
    require_file(f.detections);
    if (f.depth) require_file(*f.depth);
  }
  require_file(m.reconstruction);
  return m;
}

const PosedFrame& LoadedScene::input_frame() const {
  for (const auto& f : frames) {
    if (f.image_id == manifest.input_frame) return f;
  }
  throw InvalidInput("scene " + manifest.scene_id + " has no input frame");
}

LoadedScene load_scene(const SceneManifest& manifest) {
  LoadedScene scene;
  scene.manifest = manifest;
  for (const auto& ref : manifest.frames) {
    PosedFrame frame;
    frame.image_id = ref.image_id;
    frame.camera = io::read_camera(ref.camera);
    frame.detections = io::read_detections(ref.detections);
    for (const auto& d : frame.detections) {
      if (d.image_id != ref.image_id) {
        throw InvalidInput(ref.detections.string() + ": detection for image '" + d.image_id +
                           "' in the file of frame '" + ref.image_id + "'");
      }
    }
    if (ref.depth) frame.depth = io::read_depth(*ref.depth);
    frame.validate();
    scene.frames.push_back(std::move(frame));
  }
  scene.reconstruction = io::read_cloud(manifest.reconstruction);
  return scene;
}

std::vector<SampleScene> scan_samples(const fs::path& root) {
  const fs::path scenes_dir = root / "scene";
  if (!fs::is_directory(scenes_dir)) throw IoError("no scene directory under " + root.string());

  std::vector<SampleScene> scenes;
  for (const auto& entry : fs::directory_iterator(scenes_dir)) {
    if (!entry.is_directory()) continue;
    SampleScene s;
    s.scene_id = entry.path().filename().string();
    s.dir = entry.path();
    if (fs::is_regular_file(s.dir / "camera.json")) s.camera = s.dir / "camera.json";

    if (fs::is_directory(s.dir / "samples")) {
      for (const auto& sd : fs::directory_iterator(s.dir / "samples")) {
        const auto idx = parse_int(sd.path().filename().string());
        if (!sd.is_directory() || !idx) continue;
        SampleDir dir{*idx, {}};
        std::map<int, SamplePose> poses;
        for (const auto& f : fs::directory_iterator(sd.path())) {
          const std::string name = f.path().filename().string();
          if (name.rfind("pose", 0) != 0) continue;
          const auto dot = name.find('.');
          if (dot == std::string::npos) continue;
          const auto k = parse_int(std::string_view(name).substr(4, dot - 4));
          if (!k) continue;
          const std::string ext = name.substr(dot + 1);
          auto& pose = poses[*k];
          pose.pose = *k;
          if (ext == "detections.jsonl") pose.detections = f.path();
          else if (ext == "cloud.txt") pose.cloud = f.path();
          else if (ext == "depth.bin") pose.depth = f.path();
        }
        for (auto& [k, p] : poses) dir.poses.push_back(std::move(p));
        s.samples.push_back(std::move(dir));
      }
      std::sort(s.samples.begin(), s.samples.end(),
                [](const SampleDir& a, const SampleDir& b) { return a.index < b.index; });
    }
    if (fs::is_directory(s.dir / "vlm")) {
      for (const auto& f : fs::directory_iterator(s.dir / "vlm")) {
        if (f.path().extension() == ".json") s.vlm_counts[f.path().stem().string()] = f.path();
      }
    }
    scenes.push_back(std::move(s));
  }
  std::sort(scenes.begin(), scenes.end(),
            [](const SampleScene& a, const SampleScene& b) { return a.scene_id < b.scene_id; });
  return scenes;
}

std::vector<ConfidenceCloud> load_cloud_samples(const SampleScene& scene) {
  std::vector<ConfidenceCloud> clouds;
  for (const auto& s : scene.samples) {
    for (const auto& p : s.poses) {
      if (p.cloud) clouds.push_back(io::read_cloud(*p.cloud));
    }
  }
  return clouds;
}

ImageSamples load_image_samples(const SampleScene& scene) {
  ImageSamples out;
  bool all_depth = true;
  std::vector<DepthMap> depths;
  for (const auto& s : scene.samples) {
    const auto it = std::find_if(s.poses.begin(), s.poses.end(), [](const SamplePose& p) { return p.pose == 1; });
    if (it == s.poses.end() || !it->detections) continue;
    out.detections.push_back(io::read_detections(*it->detections));
    if (it->depth && all_depth) {
      depths.push_back(io::read_depth(*it->depth));
    } else {
      all_depth = false;
    }
  }
  if (all_depth) out.depths = std::move(depths);
  return out;
}

std::map<std::string, RegionCounts> load_vlm_counts(const SampleScene& scene) {
  std::map<std::string, RegionCounts> out;
  for (const auto& [stem, path] : scene.vlm_counts) {
    const std::string text = io::read_text(path);
    const auto counts = io::parse_region_counts(text, path.string());
    std::string label = stem;
    const json j = json::parse(text);
    if (j.contains("label") && j["label"].is_string()) label = j["label"].get<std::string>();
    out[label] = counts;
  }
  return out;
}

void write_synthetic_samples(const fs::path& root, const std::string& scene_id, const CameraModel& cam,
                             const std::vector<SyntheticSample>& samples) {
  const fs::path dir = root / "scene" / scene_id;
  io::write_text(dir / "camera.json", io::format_camera(cam));
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const fs::path sdir = dir / "samples" / std::to_string(n);
    io::write_text(sdir / "pose1.detections.jsonl", io::format_detections(samples[n].detections));
    io::write_text(sdir / "pose1.cloud.txt", io::format_cloud(samples[n].cloud));
  }
}

}  // namespace ssdbench
