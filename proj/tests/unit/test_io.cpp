#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "ssdbench/dataset.hpp"
#include "ssdbench/errors.hpp"
#include "ssdbench/io.hpp"

using namespace ssdbench;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("ssdbench_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string parse_error_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("camera round trip") {
  std::mt19937_64 rng(1);
  auto cam = oracle::camera(100.5, 99.25, 320, 180, 640, 360, oracle::random_pose(rng));
  const auto back = io::parse_camera(io::format_camera(cam), "cam");
  CHECK(back.fx == cam.fx);
  CHECK(back.pose.rotation == cam.pose.rotation);
  CHECK(back.pose.translation == cam.pose.translation);
  CHECK_THROWS_AS(io::parse_camera(R"({"fx": 1})", "cam"), ParseError);
}

TEST_CASE("cloud round trip and errors") {
  ConfidenceCloud c;
  c.points = {{Vec3(0.1, -2.5, 1e-7), 0.25, "dining table"}, {Vec3(1, 2, 3), 0.0, ""}};
  const auto back = io::parse_cloud(io::format_cloud(c), "c");
  REQUIRE(back.size() == 2);
  CHECK(back.points[0].position == c.points[0].position);
  CHECK(back.points[0].label == "dining table");
  CHECK(back.points[1].label.empty());

  CHECK(io::parse_cloud("# header\n\n1 2 3 0.5 a\n", "c").size() == 1);
  const auto msg = parse_error_message([] { io::parse_cloud("1 2 3 0.5\n1 2 x\n", "pts.txt"); });
  CHECK(msg.find("pts.txt:2:") == 0);
  CHECK_THROWS_AS(io::parse_cloud("1 2 3 1.5\n", "c"), ParseError);
}

TEST_CASE("detections with line numbers") {
  const std::vector<Detection> dets{{"img", {1, 2, 3, 4}, "chair", 0.9}, {"img", {0, 0, 10, 10}, "tv", 0.1}};
  const auto back = io::parse_detections(io::format_detections(dets), "d");
  REQUIRE(back.size() == 2);
  CHECK(back[1].label == "tv");
  CHECK(back[0].bbox.y_max == 4);

  const auto msg = parse_error_message([] {
    io::parse_detections("{\"image_id\":\"a\",\"label\":\"x\",\"bbox\":[0,0,1,1],\"confidence\":0.5}\n{oops\n", "d.jsonl");
  });
  CHECK(msg.find("d.jsonl:2:") == 0);
}

TEST_CASE("distribution round trip is exact") {
  std::mt19937_64 rng(2);
  const auto d = oracle::voxel_distribution(oracle::random_distribution(rng, 27), {3, 3, 3});
  const auto text = io::format_distribution(d);
  const auto back = io::parse_distribution(text, "d");
  CHECK(back.values == d.values);
  CHECK(std::get<VoxelDomain>(back.domain) == std::get<VoxelDomain>(d.domain));
  CHECK(io::format_distribution(back) == text);

  const auto img = oracle::image_distribution(std::vector<double>(6, 1.0 / 6), 2, 3);
  CHECK(std::get<ImageDomain>(io::parse_distribution(io::format_distribution(img), "i").domain) ==
        std::get<ImageDomain>(img.domain));

  const auto msg = parse_error_message([] { io::parse_distribution("{\n\"kind\": \"3d\",\n,}", "bad.json"); });
  CHECK(msg.find("bad.json:3:") == 0);
  CHECK_THROWS_AS(io::parse_distribution(R"({"kind":"3d","domain":{"type":"voxel","resolution":[1,1,2],"cell_size":1,"camera_anchor":[0,0,0]},"label":"a","values":[0.2,0.2]})", "x"),
                  ParseError);
}

TEST_CASE("binary grids and depth maps") {
  io::BinaryGrid g{{2, 3}, {1, 2, 3, 4, 5, 6.5}};
  const auto bytes = io::encode_grid(g);
  CHECK(bytes.substr(0, 4) == "SSDG");
  CHECK(bytes.size() == 4 + 4 + 4 + 8 + 6 * 8);
  const auto back = io::decode_grid(bytes, "g");
  CHECK(back.dims == g.dims);
  CHECK(back.values == g.values);
  CHECK_THROWS_AS(io::decode_grid(bytes.substr(0, 20), "g"), ParseError);
  CHECK_THROWS_AS(io::decode_grid("XXXX" + bytes.substr(4), "g"), ParseError);

  const auto dir = scratch("grid");
  DepthMap dm(3, 2);
  dm.depth = {1, 2, 3, 4, 0, 6};
  io::write_depth(dir / "d.bin", dm);
  const auto rd = io::read_depth(dir / "d.bin");
  CHECK(rd.width == 3);
  CHECK(rd.height == 2);
  CHECK(rd.at(1, 0) == 4);
  CHECK_FALSE(rd.has_depth(1, 1));
}

TEST_CASE("region counts and scene specs") {
  const RegionCounts c{{1, 2}, {3, 4}, {0, 5}};
  const auto back = io::parse_region_counts(io::format_region_counts(c), "r");
  CHECK(back.center.yes == 3);
  CHECK(back.right.queries == 5);
  CHECK_THROWS_AS(io::parse_region_counts(R"({"left":{"yes":3,"queries":2},"center":{"yes":0,"queries":1},"right":{"yes":0,"queries":1}})", "r"),
                  ParseError);

  SceneSpec s;
  s.scene_id = "demo";
  s.objects = {{"cup", Vec3(1, 2, 3), Vec3(0.5, 0.5, 0.5), 2.0}};
  const auto sb = io::parse_scene_spec(io::format_scene_spec(s), "s");
  CHECK(sb.scene_id == "demo");
  CHECK(sb.objects[0].center == Vec3(1, 2, 3));
  CHECK(sb.objects[0].weight == 2.0);
  CHECK(sb.domain == s.domain);

  CHECK(io::label_filename("dining table/2:x") == "dining_table_2_x");
}

TEST_CASE("io errors name the path") {
  try {
    io::read_text("/nonexistent/ssdbench/file.json");
    FAIL("expected an IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/ssdbench/file.json") != std::string::npos);
  }
}

TEST_CASE("manifests") {
  const auto dir = scratch("manifest");
  io::write_text(dir / "cam.json", io::format_camera(oracle::camera(4, 4, 4, 2, 8, 4)));
  io::write_text(dir / "f.jsonl", R"({"image_id":"f","label":"a","bbox":[0,0,2,2],"confidence":0.9})" "\n");
  io::write_text(dir / "recon.txt", "0 0 1 0\n");
  io::write_text(dir / "m.json", R"({"scene_id":"s","frames":[{"image_id":"f","camera":"cam.json","detections":"f.jsonl"}],
    "input_frame":"f","reconstruction":"recon.txt","objects":["a","b"]})");
  const auto m = load_manifest(dir / "m.json");
  CHECK(m.frames[0].camera == dir / "cam.json");
  const auto scene = load_scene(m);
  CHECK(scene.input_frame().detections.size() == 1);
  CHECK(scene.reconstruction.size() == 1);

  io::write_text(dir / "bad_input.json", R"({"scene_id":"s","frames":[{"image_id":"f","camera":"cam.json","detections":"f.jsonl"}],
    "input_frame":"g","reconstruction":"recon.txt","objects":[]})");
  CHECK_THROWS_AS(load_manifest(dir / "bad_input.json"), InvalidInput);
  io::write_text(dir / "missing.json", R"({"scene_id":"s","frames":[{"image_id":"f","camera":"nope.json","detections":"f.jsonl"}],
    "input_frame":"f","reconstruction":"recon.txt","objects":[]})");
  CHECK_THROWS_AS(load_manifest(dir / "missing.json"), IoError);
  io::write_text(dir / "broken.json", "{\n\"scene_id\": \n}");
  const auto msg = parse_error_message([&] { load_manifest(dir / "broken.json"); });
  CHECK(msg.find("broken.json:3:") != std::string::npos);
}

TEST_CASE("synthetic samples land in the layout the scanner reads") {
  const auto dir = scratch("samples");
  SyntheticSample s;
  s.detections = {{"x", {0, 0, 1, 1}, "a", 0.5}};
  s.cloud.points = {{Vec3(0, 0, 1), 0.5, "a"}};
  write_synthetic_samples(dir, "scene1", oracle::camera(4, 4, 4, 2, 8, 4), {s, s, s});
  const auto scenes = scan_samples(dir);
  REQUIRE(scenes.size() == 1);
  CHECK(scenes[0].scene_id == "scene1");
  REQUIRE(scenes[0].samples.size() == 3);
  CHECK(scenes[0].samples[2].index == 2);
  CHECK(scenes[0].camera.has_value());
  CHECK(load_cloud_samples(scenes[0]).size() == 3);
  CHECK(load_image_samples(scenes[0]).detections.size() == 3);
  CHECK(load_image_samples(scenes[0]).depths.empty());
}
