#include "rsvr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rsvr/io.hpp"
#include "rsvr/shutter.hpp"

namespace rsvr {

namespace {

constexpr std::uint64_t kLcgMultiplier = 6364136223846793005ULL;
constexpr std::uint64_t kLcgIncrement = 1442695040888963407ULL;

double positive_mod(double v, double m) {
  const double r = std::fmod(v, m);
  return r < 0.0 ? r + m : r;
}

int checker_parity(double x, double y, double period) {
  const auto cx = static_cast<std::int64_t>(std::floor(x / period));
  const auto cy = static_cast<std::int64_t>(std::floor(y / period));
  return static_cast<int>(((cx + cy) % 2 + 2) % 2);
}

double value_noise(std::uint64_t seed, double x, double y, double scale) {
  const double gx = x / scale;
  const double gy = y / scale;
  const double fx0 = std::floor(gx);
  const double fy0 = std::floor(gy);
  const auto i = static_cast<std::int64_t>(fx0);
  const auto j = static_cast<std::int64_t>(fy0);
  const double fx = gx - fx0;
  const double fy = gy - fy0;
  const double top = (1.0 - fx) * lattice_value(seed, i, j) + fx * lattice_value(seed, i + 1, j);
  const double bottom = (1.0 - fx) * lattice_value(seed, i, j + 1) + fx * lattice_value(seed, i + 1, j + 1);
  return (1.0 - fy) * top + fy * bottom;
}

void validate_texture(const TextureSpec& tex, const char* what) {
  const auto fail = [what](const std::string& m) { throw RangeError(std::string(what) + ": " + m); };
  switch (tex.kind) {
    case TextureKind::noise_checker:
      if (!(tex.scale > 0.0)) fail("noise scale must be positive");
      [[fallthrough]];
    case TextureKind::checkerboard:
      if (!(tex.period > 0.0)) fail("checker period must be positive");
      if (!(tex.contrast >= 0.0 && tex.contrast <= 1.0)) fail("contrast must lie in [0,1]");
      break;
    case TextureKind::value_noise:
      if (!(tex.scale > 0.0)) fail("noise scale must be positive");
      break;
    case TextureKind::image:
      if (tex.path.empty()) fail("image texture needs a path");
      break;
  }
}

void validate_velocity(const Velocity& v, int height, const char* what) {
  if (!std::isfinite(v.vx) || !std::isfinite(v.vy)) throw RangeError(std::string(what) + " must be finite");
  if (!(std::abs(v.vy) < height / 2.0)) {
    std::ostringstream msg;
    msg << what << " vertical component " << v.vy << " must satisfy |vy| < h/2 = " << height / 2.0;
    throw RangeError(msg.str());
  }
}

}  // namespace

double lattice_value(std::uint64_t seed, std::int64_t i, std::int64_t j) noexcept {
  std::uint64_t s = seed ^ (static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ULL) ^
                    (static_cast<std::uint64_t>(j) * 0xD1B54A32D192ED03ULL);
  for (int round = 0; round < 3; ++round) {
    s = s * kLcgMultiplier + kLcgIncrement;
    s ^= s >> 29;
  }
  return static_cast<double>(s >> 40) / static_cast<double>(1ULL << 24);
}

// Evaluates a texture at a continuous position; image textures tile.
class TextureSampler {
 public:
  explicit TextureSampler(const TextureSpec& spec) : spec_(spec) {
    if (spec.kind == TextureKind::image) image_ = read_image(spec.path);
  }

  int channels() const { return spec_.kind == TextureKind::image ? image_.channels() : 1; }

  void sample(double x, double y, std::array<double, 3>& out) const {
    switch (spec_.kind) {
      case TextureKind::checkerboard:
        out[0] = 0.5 + spec_.contrast * (checker_parity(x, y, spec_.period) - 0.5);
        return;
      case TextureKind::value_noise:
        out[0] = value_noise(spec_.seed, x, y, spec_.scale);
        return;
      case TextureKind::noise_checker:
        out[0] = (1.0 - spec_.contrast) * value_noise(spec_.seed, x, y, spec_.scale) +
                 spec_.contrast * checker_parity(x, y, spec_.period);
        return;
      case TextureKind::image:
        sample_image(x, y, out);
        return;
    }
  }

 private:
  void sample_image(double x, double y, std::array<double, 3>& out) const {
    const int w = image_.width();
    const int h = image_.height();
    const double px = positive_mod(x, w);
    const double py = positive_mod(y, h);
    const int x0 = std::min(static_cast<int>(px), w - 1);
    const int y0 = std::min(static_cast<int>(py), h - 1);
    const int x1 = (x0 + 1) % w;
    const int y1 = (y0 + 1) % h;
    const double fx = px - x0;
    const double fy = py - y0;
    for (int c = 0; c < image_.channels(); ++c) {
      const double top = (1.0 - fx) * image_.at(x0, y0, c) + fx * image_.at(x1, y0, c);
      const double bottom = (1.0 - fx) * image_.at(x0, y1, c) + fx * image_.at(x1, y1, c);
      out[static_cast<std::size_t>(c)] = (1.0 - fy) * top + fy * bottom;
    }
  }

  TextureSpec spec_;
  ImageBuffer image_;
};

void validate(const SceneSpec& scene) {
  if (scene.width < 8 || scene.height < 8) throw RangeError("scene dimensions must be at least 8x8");
  if (scene.supersample < 1 || scene.supersample > 4) throw RangeError("supersample must lie in [1,4]");
  validate_texture(scene.texture, "texture");
  validate_velocity(scene.motion.background, scene.height, "background velocity");
  if (const auto& sprite = scene.motion.sprite) {
    if (!(sprite->rect.width > 0.0 && sprite->rect.height > 0.0)) throw RangeError("sprite size must be positive");
    if (!std::isfinite(sprite->rect.x) || !std::isfinite(sprite->rect.y)) {
      throw RangeError("sprite position must be finite");
    }
    validate_velocity(sprite->velocity, scene.height, "sprite velocity");
    validate_texture(sprite->texture, "sprite texture");
  }
}

void validate(const SceneSpec& scene, const ShutterSpec& spec) {
  validate(scene);
  if (scene.height != spec.height) {
    throw SizeError("scene height " + std::to_string(scene.height) + " does not match shutter height " +
                    std::to_string(spec.height));
  }
}

SceneRenderer::SceneRenderer(SceneSpec scene) : scene_(std::move(scene)) {
  validate(scene_);
  background_ = std::make_unique<TextureSampler>(scene_.texture);
  channels_ = background_->channels();
  if (scene_.motion.sprite) {
    sprite_ = std::make_unique<TextureSampler>(scene_.motion.sprite->texture);
    channels_ = std::max(channels_, sprite_->channels());
  }
}

SceneRenderer::~SceneRenderer() = default;
SceneRenderer::SceneRenderer(SceneRenderer&&) noexcept = default;
SceneRenderer& SceneRenderer::operator=(SceneRenderer&&) noexcept = default;

bool SceneRenderer::sprite_covers(double x, double y, double t) const noexcept {
  if (!scene_.motion.sprite) return false;
  const Sprite& s = *scene_.motion.sprite;
  const double x0 = s.rect.x + s.velocity.vx * t;
  const double y0 = s.rect.y + s.velocity.vy * t;
  return x >= x0 && x < x0 + s.rect.width && y >= y0 && y < y0 + s.rect.height;
}

void SceneRenderer::render_row(double t, int y, std::span<float> out) const {
  const int n = scene_.supersample;
  const Velocity& bg = scene_.motion.background;
  const Sprite* sprite = scene_.motion.sprite ? &*scene_.motion.sprite : nullptr;
  const double inv = 1.0 / (static_cast<double>(n) * n);
  std::array<double, 3> sample{};
  for (int x = 0; x < scene_.width; ++x) {
    std::array<double, 3> acc{};
    for (int sy = 0; sy < n; ++sy) {
      const double py = y + (sy + 0.5) / n - 0.5;
      for (int sx = 0; sx < n; ++sx) {
        const double px = x + (sx + 0.5) / n - 0.5;
        int sample_channels = 0;
        if (sprite_covers(px, py, t)) {
          sprite_->sample(px - (sprite->rect.x + sprite->velocity.vx * t),
                          py - (sprite->rect.y + sprite->velocity.vy * t), sample);
          sample_channels = sprite_->channels();
        } else {
          background_->sample(px - bg.vx * t, py - bg.vy * t, sample);
          sample_channels = background_->channels();
        }
        for (int c = 0; c < channels_; ++c) {
          acc[static_cast<std::size_t>(c)] += sample[static_cast<std::size_t>(sample_channels == 1 ? 0 : c)];
        }
      }
    }
    for (int c = 0; c < channels_; ++c) {
      out[static_cast<std::size_t>(x) * channels_ + c] =
          static_cast<float>(std::clamp(acc[static_cast<std::size_t>(c)] * inv, 0.0, 1.0));
    }
  }
}

ImageBuffer SceneRenderer::render_gs(double t) const {
  ImageBuffer img(scene_.width, scene_.height, channels_);
  const int h = scene_.height;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) render_row(t, y, img.row(y));
  return img;
}

ImageBuffer SceneRenderer::render_rs(const ShutterSpec& spec, Frame frame) const {
  validate(scene_, spec);
  ImageBuffer img(scene_.width, scene_.height, channels_);
  const int h = scene_.height;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) render_row(scanline_to_time(spec, frame, y), y, img.row(y));
  return img;
}

ImageBuffer render_gs(const SceneSpec& scene, double t) {
  return SceneRenderer(scene).render_gs(t);
}

ImageBuffer render_rs(const SceneSpec& scene, const ShutterSpec& spec, Frame frame) {
  return SceneRenderer(scene).render_rs(spec, frame);
}

double landing_row_closed_form(const ShutterSpec& spec, Frame src, Frame dst, double y0, double vy) {
  const double h = spec.height;
  const double tau_src = scanline_to_time_unchecked(spec, src, y0);
  // y1 (1 - gamma vy / h) = y0 + vy (dst - gamma/2 - tau_src)
  return (y0 + vy * (index(dst) - spec.gamma / 2.0 - tau_src)) / (1.0 - spec.gamma * vy / h);
}

double landing_row_fixed_point(const ShutterSpec& spec, Frame src, Frame dst, double y0, double vy,
                               double tolerance) {
  constexpr int kMaxIterations = 50;
  const double tau_src = scanline_to_time_unchecked(spec, src, y0);
  double y1 = y0;
  double step = 0.0;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const double next = y0 + vy * (scanline_to_time_unchecked(spec, dst, y1) - tau_src);
    step = std::abs(next - y1);
    y1 = next;
    if (step <= 1e-9) return y1;
  }
  if (step > tolerance) {
    std::ostringstream msg;
    msg << "landing-row iteration did not converge for row " << y0 << " (last step " << step << ")";
    throw SolverError(msg.str());
  }
  return y1;
}

FlowField gt_flow(const SceneSpec& scene, const ShutterSpec& spec, Frame src) {
  validate(scene, spec);
  const Frame dst = src == Frame::first ? Frame::second : Frame::first;
  const SceneRenderer renderer(scene);  // sprite geometry only
  FlowField flow(scene.width, scene.height);
  const int h = scene.height;
  std::string failure;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const double tau_src = scanline_to_time(spec, src, y);
    for (int x = 0; x < scene.width; ++x) {
      const Velocity v = renderer.sprite_covers(x, y, tau_src) ? scene.motion.sprite->velocity
                                                                : scene.motion.background;
      try {
        const double y1 = landing_row_fixed_point(spec, src, dst, y, v.vy);
        const double dt = scanline_to_time_unchecked(spec, dst, y1) - tau_src;
        flow.at(x, y) = {static_cast<float>(v.vx * dt), static_cast<float>(y1 - y)};
      } catch (const SolverError& e) {
#pragma omp critical(rsvr_gt_flow_failure)
        if (failure.empty()) {
          failure = std::string(e.what()) + " at pixel (" + std::to_string(x) + ", " + std::to_string(y) + ")";
        }
      }
    }
  }
  if (!failure.empty()) throw SolverError(failure);
  return flow;
}

std::string format_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", t);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string gt_file_name(double t) {
  return "gt_" + format_time(t) + ".png";
}

Manifest emit_dataset(const SceneSpec& scene, const ShutterSpec& spec, const std::vector<double>& times,
                      const std::filesystem::path& out_dir) {
  validate(scene, spec);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory " + out_dir.string() + ": " + ec.message());

  const SceneRenderer renderer(scene);
  Manifest manifest;
  manifest.scene = scene;
  manifest.shutter = spec;
  manifest.times = times;

  const auto add = [&](std::string role, const std::string& name, std::optional<double> t) {
    manifest.files.push_back({std::move(role), name, sha256_file(out_dir / name), t});
  };

  write_image(renderer.render_rs(spec, Frame::first), out_dir / "rs0.png");
  add("rs0", "rs0.png", std::nullopt);
  write_image(renderer.render_rs(spec, Frame::second), out_dir / "rs1.png");
  add("rs1", "rs1.png", std::nullopt);
  write_flo(gt_flow(scene, spec, Frame::first), out_dir / "flow_01.flo");
  add("flow_01", "flow_01.flo", std::nullopt);
  write_flo(gt_flow(scene, spec, Frame::second), out_dir / "flow_10.flo");
  add("flow_10", "flow_10.flo", std::nullopt);
  for (double t : times) {
    const std::string name = gt_file_name(t);
    write_image(renderer.render_gs(t), out_dir / name);
    add("gt", name, t);
  }
  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace rsvr
