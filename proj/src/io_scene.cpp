#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "rsvr/io.hpp"

namespace rsvr {

namespace {

constexpr int kSchemaVersion = 1;

struct Entry {
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const std::map<std::string, TextureKind>& texture_kinds() {
  static const std::map<std::string, TextureKind> kinds = {{"checkerboard", TextureKind::checkerboard},
                                                          {"value_noise", TextureKind::value_noise},
                                                          {"noise_checker", TextureKind::noise_checker},
                                                          {"image", TextureKind::image}};
  return kinds;
}

std::string kind_name(TextureKind kind) {
  for (const auto& [name, k] : texture_kinds()) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::vector<std::string> texture_params(TextureKind kind) {
  switch (kind) {
    case TextureKind::checkerboard:
      return {"period", "contrast"};
    case TextureKind::value_noise:
      return {"seed", "scale"};
    case TextureKind::noise_checker:
      return {"seed", "scale", "period", "contrast"};
    case TextureKind::image:
      return {"path"};
  }
  return {};
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

class SceneParser {
 public:
  SceneParser(const std::string& text, std::string source) : source_(std::move(source)) {
    static const std::set<std::string> known = [] {
      std::set<std::string> keys = {"schema_version", "width",   "height",         "gamma",
                                    "supersample",    "velocity", "texture",       "sprite.rect",
                                    "sprite.velocity", "sprite.texture"};
      for (const char* param : {"period", "contrast", "seed", "scale", "path"}) {
        keys.insert(std::string("texture.") + param);
        keys.insert(std::string("sprite.texture.") + param);
      }
      return keys;
    }();

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const std::string content = trim(raw.substr(0, raw.find('#')));
      if (content.empty()) continue;
      const auto eq = content.find('=');
      if (eq == std::string::npos) fail("", line, "expected 'key = value'");
      const std::string key = trim(content.substr(0, eq));
      const std::string value = trim(content.substr(eq + 1));
      if (key.empty()) fail("", line, "empty field name");
      if (!known.contains(key)) fail(key, line, "unknown field '" + key + "'");
      if (entries_.contains(key)) {
        fail(key, line, "duplicate field '" + key + "' (first set on line " + std::to_string(entries_[key].line) + ")");
      }
      if (value.empty()) fail(key, line, "field '" + key + "' has no value");
      entries_[key] = {value, line};
    }
  }

  SceneDescription parse() {
    const int version = integer("schema_version");
    if (version != kSchemaVersion) {
      fail("schema_version", line_of("schema_version"), "unsupported schema_version " + std::to_string(version));
    }
    SceneDescription desc;
    desc.scene.width = integer("width");
    desc.scene.height = integer("height");
    desc.scene.supersample = integer("supersample");
    const double gamma = number("gamma");
    if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma", line_of("gamma"), "gamma must lie in (0,1], got " + entries_["gamma"].value);
    if (desc.scene.width < 8) fail("width", line_of("width"), "width must be >= 8");
    if (desc.scene.height < 8) fail("height", line_of("height"), "height must be >= 8");
    if (desc.scene.supersample < 1 || desc.scene.supersample > 4) {
      fail("supersample", line_of("supersample"), "supersample must lie in [1,4]");
    }
    desc.shutter = ShutterSpec(desc.scene.height, gamma);

    const auto velocity = numbers("velocity", 2);
    desc.scene.motion.background = {velocity[0], velocity[1]};
    desc.scene.texture = texture("texture");

    const bool has_sprite = std::any_of(entries_.begin(), entries_.end(),
                                        [](const auto& kv) { return kv.first.starts_with("sprite."); });
    if (has_sprite) {
      Sprite sprite;
      const auto rect = numbers("sprite.rect", 4);
      sprite.rect = {rect[0], rect[1], rect[2], rect[3]};
      const auto sv = numbers("sprite.velocity", 2);
      sprite.velocity = {sv[0], sv[1]};
      sprite.texture = texture("sprite.texture");
      desc.scene.motion.sprite = sprite;
    }

    try {
      validate(desc.scene, desc.shutter);
    } catch (const Error& e) {
      throw ParseError("", 0, source_ + ": invalid scene: " + e.what());
    }
    return desc;
  }

 private:
  [[noreturn]] void fail(const std::string& field, int line, const std::string& message) const {
    std::string where = source_;
    if (line > 0) where += ":" + std::to_string(line);
    throw ParseError(field, line, where + ": " + message);
  }

  int line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  const Entry& require(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) fail(key, 0, "missing field '" + key + "'");
    return it->second;
  }

  double number(const std::string& key) { return parse_number(key, require(key)); }

  double parse_number(const std::string& key, const Entry& e) const {
    double v = 0.0;
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
      fail(key, e.line, "field '" + key + "' expects a finite number, got '" + e.value + "'");
    }
    return v;
  }

  int integer(const std::string& key) {
    const Entry& e = require(key);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc() || ptr != e.value.data() + e.value.size()) {
      fail(key, e.line, "field '" + key + "' expects an integer, got '" + e.value + "'");
    }
    return v;
  }

  std::vector<double> numbers(const std::string& key, std::size_t count) {
    const Entry& e = require(key);
    std::istringstream in(e.value);
    std::vector<double> out;
    std::string token;
    while (in >> token) out.push_back(parse_number(key, {token, e.line}));
    if (out.size() != count) {
      fail(key, e.line, "field '" + key + "' expects " + std::to_string(count) + " numbers");
    }
    return out;
  }

  TextureSpec texture(const std::string& prefix) {
    const Entry& kind_entry = require(prefix);
    const auto kind = texture_kinds().find(kind_entry.value);
    if (kind == texture_kinds().end()) {
      fail(prefix, kind_entry.line, "unknown texture kind '" + kind_entry.value + "'");
    }
    TextureSpec tex;
    tex.kind = kind->second;
    const std::vector<std::string> params = texture_params(tex.kind);
    for (const char* param : {"period", "contrast", "seed", "scale", "path"}) {
      const std::string key = prefix + "." + param;
      const bool wanted = std::find(params.begin(), params.end(), param) != params.end();
      if (!wanted && entries_.contains(key)) {
        fail(key, line_of(key), "field '" + key + "' does not apply to texture kind '" + kind_entry.value + "'");
      }
    }
    for (const std::string& param : params) {
      const std::string key = prefix + "." + param;
      if (param == "period") tex.period = number(key);
      if (param == "contrast") tex.contrast = number(key);
      if (param == "scale") tex.scale = number(key);
      if (param == "path") tex.path = require(key).value;
      if (param == "seed") {
        const Entry& e = require(key);
        const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), tex.seed);
        if (ec != std::errc() || ptr != e.value.data() + e.value.size()) {
          fail(key, e.line, "field '" + key + "' expects an unsigned 64-bit integer, got '" + e.value + "'");
        }
      }
    }
    return tex;
  }

  std::string source_;
  std::map<std::string, Entry> entries_;
};

void format_texture(std::ostringstream& out, const std::string& prefix, const TextureSpec& tex) {
  out << prefix << " = " << kind_name(tex.kind) << "\n";
  for (const std::string& param : texture_params(tex.kind)) {
    out << prefix << "." << param << " = ";
    if (param == "period") out << format_double(tex.period);
    if (param == "contrast") out << format_double(tex.contrast);
    if (param == "scale") out << format_double(tex.scale);
    if (param == "seed") out << tex.seed;
    if (param == "path") out << tex.path;
    out << "\n";
  }
}

}  // namespace

SceneDescription parse_scene_spec(const std::string& text, const std::string& source) {
  return SceneParser(text, source).parse();
}

std::string format_scene_spec(const SceneSpec& scene, const ShutterSpec& shutter) {
  std::ostringstream out;
  out << "schema_version = " << kSchemaVersion << "\n";
  out << "width = " << scene.width << "\n";
  out << "height = " << scene.height << "\n";
  out << "gamma = " << format_double(shutter.gamma) << "\n";
  out << "supersample = " << scene.supersample << "\n";
  out << "velocity = " << format_double(scene.motion.background.vx) << " "
      << format_double(scene.motion.background.vy) << "\n";
  format_texture(out, "texture", scene.texture);
  if (const auto& sprite = scene.motion.sprite) {
    out << "sprite.rect = " << format_double(sprite->rect.x) << " " << format_double(sprite->rect.y) << " "
        << format_double(sprite->rect.width) << " " << format_double(sprite->rect.height) << "\n";
    out << "sprite.velocity = " << format_double(sprite->velocity.vx) << " " << format_double(sprite->velocity.vy)
        << "\n";
    format_texture(out, "sprite.texture", sprite->texture);
  }
  return out.str();
}

SceneDescription read_scene_spec(const std::filesystem::path& path) {
  return parse_scene_spec(read_text_file(path), path.string());
}

void write_scene_spec(const SceneSpec& scene, const ShutterSpec& shutter, const std::filesystem::path& path) {
  validate(scene, shutter);
  write_text_file(path, format_scene_spec(scene, shutter));
}

}  // namespace rsvr
