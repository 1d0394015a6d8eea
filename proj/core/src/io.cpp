#include "ssdbench/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ssdbench/errors.hpp"

namespace ssdbench::io {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return ss.str();
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("error while writing " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

namespace {

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
  return 1 + static_cast<std::size_t>(std::count(text.begin(), end, '\n'));
}

json parse_json(const std::string& text, const std::string& origin, std::size_t line_offset = 0) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t line = e.byte == 0 ? 1 : line_of_byte(text, e.byte - 1);
    throw ParseError(origin, line + line_offset, e.what());
  }
}

template <class Fn>
auto with_schema(const std::string& origin, std::size_t line, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw ParseError(origin, line, e.what());
  } catch (const InvalidInput& e) {
    throw ParseError(origin, line, e.what());
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

CameraModel parse_camera(const std::string& text, const std::string& origin) {
  const json j = parse_json(text, origin);
  return with_schema(origin, 1, [&] {
    CameraModel cam;
    cam.fx = j.at("fx").get<double>();
    cam.fy = j.at("fy").get<double>();
    cam.cx = j.at("cx").get<double>();
    cam.cy = j.at("cy").get<double>();
    cam.width = j.at("width").get<int>();
    cam.height = j.at("height").get<int>();
    const auto r = j.at("R").get<std::vector<double>>();
    const auto t = j.at("t").get<std::vector<double>>();
    if (r.size() != 9 || t.size() != 3) throw InvalidInput("camera needs R[9] and t[3]");
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) cam.pose.rotation(i, k) = r[static_cast<std::size_t>(3 * i + k)];
      cam.pose.translation[i] = t[static_cast<std::size_t>(i)];
    }
    cam.validate();
    return cam;
  });
}

CameraModel read_camera(const fs::path& path) { return parse_camera(read_text(path), path.string()); }

std::string format_camera(const CameraModel& cam) {
  ordered_json j;
  j["fx"] = cam.fx;
  j["fy"] = cam.fy;
  j["cx"] = cam.cx;
  j["cy"] = cam.cy;
  j["width"] = cam.width;
  j["height"] = cam.height;
  std::vector<double> r(9);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) r[static_cast<std::size_t>(3 * i + k)] = cam.pose.rotation(i, k);
  }
  j["R"] = r;
  j["t"] = {cam.pose.translation.x(), cam.pose.translation.y(), cam.pose.translation.z()};
  return j.dump(2) + "\n";
}

ConfidenceCloud parse_cloud(const std::string& text, const std::string& origin) {
  ConfidenceCloud cloud;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    CloudPoint p;
    double x = 0, y = 0, z = 0;
    if (!(fields >> x >> y >> z >> p.confidence)) {
      throw ParseError(origin, lineno, "expected 'x y z confidence label'");
    }
    p.position = {x, y, z};
    std::getline(fields >> std::ws, p.label);
    while (!p.label.empty() && (p.label.back() == ' ' || p.label.back() == '\t')) p.label.pop_back();
    if (!p.position.allFinite()) throw ParseError(origin, lineno, "non-finite coordinate");
    if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) throw ParseError(origin, lineno, "confidence outside [0,1]");
    cloud.points.push_back(std::move(p));
  }
  return cloud;
}

ConfidenceCloud read_cloud(const fs::path& path) { return parse_cloud(read_text(path), path.string()); }

std::string format_cloud(const ConfidenceCloud& cloud) {
  std::string out;
  out.reserve(cloud.size() * 80);
  for (const auto& p : cloud.points) {
    out += format_double(p.position.x());
    out += ' ';
    out += format_double(p.position.y());
    out += ' ';
    out += format_double(p.position.z());
    out += ' ';
    out += format_double(p.confidence);
    if (!p.label.empty()) {
      out += ' ';
      out += p.label;
    }
    out += '\n';
  }
  return out;
}

std::vector<Detection> parse_detections(const std::string& text, const std::string& origin) {
  std::vector<Detection> dets;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = parse_json(line, origin, lineno - 1);
    dets.push_back(with_schema(origin, lineno, [&] {
      Detection d;
      d.image_id = j.at("image_id").get<std::string>();
      d.label = j.at("label").get<std::string>();
      const auto b = j.at("bbox").get<std::vector<double>>();
      if (b.size() != 4) throw InvalidInput("bbox needs four numbers");
      d.bbox = {b[0], b[1], b[2], b[3]};
      d.confidence = j.at("confidence").get<double>();
      if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) throw InvalidInput("confidence outside [0,1]");
      return d;
    }));
  }
  return dets;
}

std::vector<Detection> read_detections(const fs::path& path) {
  return parse_detections(read_text(path), path.string());
}

std::string format_detections(const std::vector<Detection>& detections) {
  std::string out;
  for (const auto& d : detections) {
    ordered_json j;
    j["image_id"] = d.image_id;
    j["label"] = d.label;
    j["bbox"] = {d.bbox.x_min, d.bbox.y_min, d.bbox.x_max, d.bbox.y_max};
    j["confidence"] = d.confidence;
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace {

ordered_json domain_json(const Domain& domain) {
  return std::visit(
      [](const auto& d) -> ordered_json {
        using T = std::decay_t<decltype(d)>;
        ordered_json j;
        if constexpr (std::is_same_v<T, ImageDomain>) {
          j["type"] = "image";
          j["height"] = d.height;
          j["width_center"] = d.width_center;
          j["left_margin"] = d.left_margin;
          j["right_margin"] = d.right_margin;
        } else {
          j["type"] = "voxel";
          j["resolution"] = d.resolution;
          j["cell_size"] = d.cell_size;
          j["camera_anchor"] = d.camera_anchor;
        }
        return j;
      },
      domain);
}

Domain domain_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "image") {
    ImageDomain d;
    d.height = j.at("height").get<int>();
    d.width_center = j.at("width_center").get<int>();
    d.left_margin = j.at("left_margin").get<int>();
    d.right_margin = j.at("right_margin").get<int>();
    d.validate();
    return d;
  }
  if (type == "voxel") {
    VoxelDomain d;
    d.resolution = j.at("resolution").get<std::array<int, 3>>();
    d.cell_size = j.at("cell_size").get<double>();
    d.camera_anchor = j.at("camera_anchor").get<std::array<double, 3>>();
    d.validate();
    return d;
  }
  throw InvalidInput("unknown domain type '" + type + "'");
}

}  // namespace

SpatialDistribution parse_distribution(const std::string& text, const std::string& origin) {
  const json j = parse_json(text, origin);
  return with_schema(origin, 1, [&] {
    SpatialDistribution d;
    d.kind = parse_task(j.at("kind").get<std::string>());
    d.domain = domain_from_json(j.at("domain"));
    d.label = j.at("label").get<std::string>();
    d.values = j.at("values").get<std::vector<double>>();
    d.validate();
    return d;
  });
}

SpatialDistribution read_distribution(const fs::path& path) {
  return parse_distribution(read_text(path), path.string());
}

std::string format_distribution(const SpatialDistribution& dist) {
  ordered_json j;
  j["kind"] = std::string(to_string(dist.kind));
  j["domain"] = domain_json(dist.domain);
  j["label"] = dist.label;
  j["values"] = dist.values;
  return j.dump() + "\n";
}

namespace {

constexpr char kMagic[4] = {'S', 'S', 'D', 'G'};
constexpr std::uint32_t kVersion = 1;

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <class T>
void put(std::string& out, T v) {
  v = to_little(v);
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

template <class T>
T take(const std::string& in, std::size_t& pos, const std::string& origin) {
  if (pos + sizeof(T) > in.size()) throw ParseError(origin, 1, "truncated binary grid");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return to_little(v);
}

}  // namespace

std::string encode_grid(const BinaryGrid& grid) {
  std::size_t n = 1;
  for (const auto d : grid.dims) n *= d;
  if (n != grid.values.size()) throw InvalidInput("binary grid dimensions do not match its values");
  std::string out(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dims.size()));
  for (const auto d : grid.dims) put<std::uint32_t>(out, d);
  for (const double v : grid.values) put<double>(out, v);
  return out;
}

BinaryGrid decode_grid(const std::string& bytes, const std::string& origin) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ParseError(origin, 1, "not a binary grid (bad magic)");
  }
  std::size_t pos = 4;
  if (take<std::uint32_t>(bytes, pos, origin) != kVersion) throw ParseError(origin, 1, "unsupported grid version");
  const auto rank = take<std::uint32_t>(bytes, pos, origin);
  if (rank == 0 || rank > 8) throw ParseError(origin, 1, "implausible grid rank");
  BinaryGrid g;
  std::size_t n = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    g.dims.push_back(take<std::uint32_t>(bytes, pos, origin));
    n *= g.dims.back();
  }
  if (bytes.size() - pos != n * sizeof(double)) throw ParseError(origin, 1, "grid payload size mismatch");
  g.values.resize(n);
  for (auto& v : g.values) v = take<double>(bytes, pos, origin);
  return g;
}

void write_grid(const fs::path& path, const BinaryGrid& grid) { write_text(path, encode_grid(grid)); }

BinaryGrid read_grid(const fs::path& path) { return decode_grid(read_text(path), path.string()); }

DepthMap read_depth(const fs::path& path) {
  auto g = read_grid(path);
  if (g.dims.size() != 2) throw ParseError(path.string(), 1, "depth map must be a rank-2 grid");
  DepthMap d;
  d.height = static_cast<int>(g.dims[0]);
  d.width = static_cast<int>(g.dims[1]);
  d.depth = std::move(g.values);
  return d;
}

void write_depth(const fs::path& path, const DepthMap& depth) {
  write_grid(path, BinaryGrid{{static_cast<std::uint32_t>(depth.height), static_cast<std::uint32_t>(depth.width)},
                              depth.depth});
}

RegionCounts parse_region_counts(const std::string& text, const std::string& origin) {
  const json j = parse_json(text, origin);
  return with_schema(origin, 1, [&] {
    auto vote = [&](const char* key) {
      const auto& r = j.at(key);
      return RegionVote{r.at("yes").get<int>(), r.at("queries").get<int>()};
    };
    RegionCounts c{vote("left"), vote("center"), vote("right")};
    c.validate();
    return c;
  });
}

RegionCounts read_region_counts(const fs::path& path) {
  return parse_region_counts(read_text(path), path.string());
}

std::string format_region_counts(const RegionCounts& counts) {
  ordered_json j;
  for (const auto& [key, v] : {std::pair{"left", counts.left}, std::pair{"center", counts.center},
                               std::pair{"right", counts.right}}) {
    j[key] = ordered_json{{"yes", v.yes}, {"queries", v.queries}};
  }
  return j.dump(2) + "\n";
}

namespace {

Vec3 vec3_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw InvalidInput("expected a 3-vector");
  return {v[0], v[1], v[2]};
}

std::vector<double> vec3_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

SceneSpec parse_scene_spec(const std::string& text, const std::string& origin) {
  const json j = parse_json(text, origin);
  return with_schema(origin, 1, [&] {
    SceneSpec spec;
    spec.scene_id = j.value("scene_id", spec.scene_id);
    if (j.contains("room")) {
      spec.room_min = vec3_from_json(j["room"].at("min"));
      spec.room_max = vec3_from_json(j["room"].at("max"));
    }
    if (j.contains("domain")) {
      const Domain d = domain_from_json(j["domain"]);
      if (!std::holds_alternative<VoxelDomain>(d)) throw InvalidInput("scene domain must be a voxel grid");
      spec.domain = std::get<VoxelDomain>(d);
    }
    for (const auto& o : j.at("objects")) {
      SyntheticObject obj;
      obj.label = o.at("label").get<std::string>();
      obj.center = vec3_from_json(o.at("center"));
      obj.extent = vec3_from_json(o.at("extent"));
      obj.weight = o.value("weight", 1.0);
      spec.objects.push_back(std::move(obj));
    }
    return spec;
  });
}

SceneSpec read_scene_spec(const fs::path& path) { return parse_scene_spec(read_text(path), path.string()); }

std::string format_scene_spec(const SceneSpec& spec) {
  ordered_json j;
  j["scene_id"] = spec.scene_id;
  j["room"] = ordered_json{{"min", vec3_json(spec.room_min)}, {"max", vec3_json(spec.room_max)}};
  j["domain"] = domain_json(spec.domain);
  j["objects"] = ordered_json::array();
  for (const auto& o : spec.objects) {
    ordered_json e;
    e["label"] = o.label;
    e["center"] = vec3_json(o.center);
    e["extent"] = vec3_json(o.extent);
    e["weight"] = o.weight;
    j["objects"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

std::string label_filename(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    if (c == ' ' || c == '/' || c == '\\' || c == ':') c = '_';
  }
  return out;
}

}  // namespace ssdbench::io
