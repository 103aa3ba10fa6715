#include <cstdio>
#include <cstdlib>
#include <json.hpp>

#include "rsvr/io.hpp"

namespace rsvr {

using Json = nlohmann::ordered_json;

namespace {

Json texture_to_json(const TextureSpec& tex) {
  switch (tex.kind) {
    case TextureKind::checkerboard:
      return {{"kind", "checkerboard"}, {"period", tex.period}, {"contrast", tex.contrast}};
    case TextureKind::value_noise:
      return {{"kind", "value_noise"}, {"seed", tex.seed}, {"scale", tex.scale}};
    case TextureKind::noise_checker:
      return {{"kind", "noise_checker"},
              {"seed", tex.seed},
              {"scale", tex.scale},
              {"period", tex.period},
              {"contrast", tex.contrast}};
    case TextureKind::image:
      return {{"kind", "image"}, {"path", tex.path}};
  }
  return {};
}

TextureSpec texture_from_json(const Json& j) {
  TextureSpec tex;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "checkerboard") {
    tex.kind = TextureKind::checkerboard;
  } else if (kind == "value_noise") {
    tex.kind = TextureKind::value_noise;
  } else if (kind == "noise_checker") {
    tex.kind = TextureKind::noise_checker;
  } else if (kind == "image") {
    tex.kind = TextureKind::image;
  } else {
    throw FormatError("unknown texture kind '" + kind + "'");
  }
  if (j.contains("period")) tex.period = j.at("period").get<double>();
  if (j.contains("contrast")) tex.contrast = j.at("contrast").get<double>();
  if (j.contains("seed")) tex.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("scale")) tex.scale = j.at("scale").get<double>();
  if (j.contains("path")) tex.path = j.at("path").get<std::string>();
  return tex;
}

Json scene_to_json(const SceneSpec& scene) {
  Json j = {{"width", scene.width},
            {"height", scene.height},
            {"supersample", scene.supersample},
            {"texture", texture_to_json(scene.texture)},
            {"velocity", {scene.motion.background.vx, scene.motion.background.vy}}};
  if (const auto& s = scene.motion.sprite) {
    j["sprite"] = {{"rect", {s->rect.x, s->rect.y, s->rect.width, s->rect.height}},
                   {"velocity", {s->velocity.vx, s->velocity.vy}},
                   {"texture", texture_to_json(s->texture)}};
  } else {
    j["sprite"] = nullptr;
  }
  return j;
}

SceneSpec scene_from_json(const Json& j) {
  SceneSpec scene;
  scene.width = j.at("width").get<int>();
  scene.height = j.at("height").get<int>();
  scene.supersample = j.at("supersample").get<int>();
  scene.texture = texture_from_json(j.at("texture"));
  const auto& v = j.at("velocity");
  scene.motion.background = {v.at(0).get<double>(), v.at(1).get<double>()};
  if (j.contains("sprite") && !j.at("sprite").is_null()) {
    const Json& s = j.at("sprite");
    Sprite sprite;
    const auto& r = s.at("rect");
    sprite.rect = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(), r.at(3).get<double>()};
    const auto& sv = s.at("velocity");
    sprite.velocity = {sv.at(0).get<double>(), sv.at(1).get<double>()};
    sprite.texture = texture_from_json(s.at("texture"));
    scene.motion.sprite = sprite;
  }
  return scene;
}

Json metric_number(double v) {
  return round_significant(v);
}

Json metrics_to_json(const FrameMetrics& m) {
  Json j;
  j["name"] = m.name;
  j["t"] = m.t ? Json(round_significant(*m.t)) : Json(nullptr);
  j["psnr_db"] = metric_number(m.psnr_db);
  j["psnr_masked_db"] = metric_number(m.psnr_masked_db);
  j["ssim"] = metric_number(m.ssim);
  j["l1"] = metric_number(m.l1);
  j["hole_fraction"] = metric_number(m.hole_fraction);
  j["mse"] = metric_number(m.mse);
  j["mse_masked"] = metric_number(m.mse_masked);
  return j;
}

FrameMetrics metrics_from_json(const Json& j) {
  FrameMetrics m;
  m.name = j.at("name").get<std::string>();
  if (!j.at("t").is_null()) m.t = j.at("t").get<double>();
  m.psnr_db = j.at("psnr_db").get<double>();
  m.psnr_masked_db = j.at("psnr_masked_db").get<double>();
  m.ssim = j.at("ssim").get<double>();
  m.l1 = j.at("l1").get<double>();
  m.hole_fraction = j.at("hole_fraction").get<double>();
  m.mse = j.at("mse").get<double>();
  m.mse_masked = j.at("mse_masked").get<double>();
  return m;
}

Json parse_json_file(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

double round_significant(double value, int digits) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return std::strtod(buf, nullptr);
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  Json files = Json::array();
  for (const ManifestFile& f : manifest.files) {
    Json entry = {{"role", f.role}, {"path", f.path}, {"sha256", f.sha256}};
    entry["t"] = f.t ? Json(*f.t) : Json(nullptr);
    files.push_back(entry);
  }
  const Json j = {{"schema_version", manifest.schema_version},
                  {"shutter", {{"height", manifest.shutter.height}, {"gamma", manifest.shutter.gamma}}},
                  {"scene", scene_to_json(manifest.scene)},
                  {"times", manifest.times},
                  {"files", files}};
  write_text_file(path, j.dump(2) + "\n");
}

Manifest read_manifest(const std::filesystem::path& path) {
  const Json j = parse_json_file(path);
  try {
    Manifest m;
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != 1) {
      throw FormatError(path.string() + ": unsupported manifest schema " + std::to_string(m.schema_version));
    }
    m.shutter = ShutterSpec(j.at("shutter").at("height").get<int>(), j.at("shutter").at("gamma").get<double>());
    m.scene = scene_from_json(j.at("scene"));
    m.times = j.at("times").get<std::vector<double>>();
    for (const Json& f : j.at("files")) {
      ManifestFile file{f.at("role").get<std::string>(), f.at("path").get<std::string>(),
                        f.at("sha256").get<std::string>(), std::nullopt};
      if (!f.at("t").is_null()) file.t = f.at("t").get<double>();
      m.files.push_back(std::move(file));
    }
    return m;
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": malformed manifest: " + e.what());
  } catch (const RangeError& e) {
    throw FormatError(path.string() + ": malformed manifest: " + e.what());
  }
}

std::string format_report(const MetricsReport& report) {
  Json j;
  j["kind"] = report.kind;
  j["entries"] = Json::array();
  for (const FrameMetrics& m : report.entries) j["entries"].push_back(metrics_to_json(m));
  j["mean"] = report.mean ? metrics_to_json(*report.mean) : Json(nullptr);
  return j.dump(2) + "\n";
}

void write_report(const MetricsReport& report, const std::filesystem::path& path) {
  write_text_file(path, format_report(report));
}

MetricsReport read_report(const std::filesystem::path& path) {
  const Json j = parse_json_file(path);
  try {
    MetricsReport report;
    report.kind = j.at("kind").get<std::string>();
    for (const Json& e : j.at("entries")) report.entries.push_back(metrics_from_json(e));
    if (!j.at("mean").is_null()) report.mean = metrics_from_json(j.at("mean"));
    return report;
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": malformed report: " + e.what());
  }
}

std::string format_flow_analysis(const FlowAnalysisReport& report) {
  Json j;
  j["kind"] = "vertical_ratio";
  j["flow"] = report.flow;
  j["height"] = report.height;
  j["mean"] = metric_number(report.stats.mean);
  j["std"] = metric_number(report.stats.std);
  j["max"] = metric_number(report.stats.max);
  return j.dump(2) + "\n";
}

std::string format_video_report(const std::vector<VideoFrameEntry>& frames) {
  Json j;
  j["kind"] = "video";
  j["frames"] = Json::array();
  for (const VideoFrameEntry& f : frames) {
    Json e;
    e["index"] = f.index;
    e["t"] = metric_number(f.t);
    e["file"] = f.file;
    e["hole_fraction"] = metric_number(f.hole_fraction);
    j["frames"].push_back(e);
  }
  return j.dump(2) + "\n";
}

}  // namespace rsvr
