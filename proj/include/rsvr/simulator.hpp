#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rsvr/core.hpp"

namespace rsvr {

// Synthetic rolling-shutter camera. A scene is a textured plane translating
// at constant velocity, optionally with a textured rectangular sprite moving
// on top of it. Global-shutter frames are rendered at any time t; an RS frame
// copies each scanline from the GS frame at that scanline's exposure time.

enum class TextureKind { checkerboard, value_noise, noise_checker, image };

struct TextureSpec {
  TextureKind kind = TextureKind::value_noise;
  double period = 32.0;     // checker cell size in pixels
  double contrast = 0.5;    // checker amplitude (checkerboard, noise_checker)
  std::uint64_t seed = 0;   // value-noise lattice seed
  double scale = 16.0;      // value-noise lattice spacing in pixels
  std::string path;         // image texture, tiled periodically

  friend bool operator==(const TextureSpec&, const TextureSpec&) = default;
};

struct Velocity {
  double vx = 0.0;  // pixels per frame interval
  double vy = 0.0;

  friend bool operator==(const Velocity&, const Velocity&) = default;
};

struct Rect {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Sprite {
  Rect rect;  // position at t = 0
  Velocity velocity;
  TextureSpec texture;  // sampled in sprite-local coordinates

  friend bool operator==(const Sprite&, const Sprite&) = default;
};

struct MotionModel {
  Velocity background;
  std::optional<Sprite> sprite;

  friend bool operator==(const MotionModel&, const MotionModel&) = default;
};

struct SceneSpec {
  TextureSpec texture;
  int width = 64;
  int height = 64;
  MotionModel motion;
  int supersample = 2;  // per-axis subsamples

  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

/// Throws RangeError when the scene or its pairing with the shutter is invalid.
void validate(const SceneSpec& scene, const ShutterSpec& spec);
void validate(const SceneSpec& scene);

/// Value-noise lattice value in [0,1) at integer lattice point (i, j).
double lattice_value(std::uint64_t seed, std::int64_t i, std::int64_t j) noexcept;

class TextureSampler;

/// Loads textures once and renders any number of frames from one scene.
class SceneRenderer {
 public:
  explicit SceneRenderer(SceneSpec scene);
  ~SceneRenderer();
  SceneRenderer(SceneRenderer&&) noexcept;
  SceneRenderer& operator=(SceneRenderer&&) noexcept;

  const SceneSpec& scene() const noexcept { return scene_; }
  int channels() const noexcept { return channels_; }

  /// Global-shutter frame at time t.
  ImageBuffer render_gs(double t) const;
  /// Row y of render_gs(t), written into `out` (width * channels floats).
  void render_row(double t, int y, std::span<float> out) const;
  /// Rolling-shutter frame: row s taken from render_gs(scanline time of s).
  ImageBuffer render_rs(const ShutterSpec& spec, Frame frame) const;

  /// Whether the sprite covers point (x, y) at time t.
  bool sprite_covers(double x, double y, double t) const noexcept;

 private:
  SceneSpec scene_;
  int channels_ = 1;
  std::unique_ptr<TextureSampler> background_;
  std::unique_ptr<TextureSampler> sprite_;
};

ImageBuffer render_gs(const SceneSpec& scene, double t);
ImageBuffer render_rs(const SceneSpec& scene, const ShutterSpec& spec, Frame frame);

/// Landing row of a point exposed on row y0 of `src` and observed in `dst`
/// under vertical velocity vy, solving y1 = y0 + vy (tau_dst(y1) - tau_src)
/// in closed form.
double landing_row_closed_form(const ShutterSpec& spec, Frame src, Frame dst, double y0, double vy);

/// Same landing row by fixed-point iteration (contraction ratio
/// |gamma vy / h| < 1/2). Throws SolverError if 50 iterations do not reach
/// `tolerance` rows.
double landing_row_fixed_point(const ShutterSpec& spec, Frame src, Frame dst, double y0, double vy,
                               double tolerance = 1e-4);

/// Ground-truth inter-RS-frame optical flow from `src` to the other frame.
/// Sprite-covered source pixels move with the sprite; every other pixel
/// carries the background flow.
FlowField gt_flow(const SceneSpec& scene, const ShutterSpec& spec, Frame src);

struct ManifestFile {
  std::string role;  // rs0, rs1, flow_01, flow_10, gt
  std::string path;  // relative to the dataset directory
  std::string sha256;
  std::optional<double> t;

  friend bool operator==(const ManifestFile&, const ManifestFile&) = default;
};

struct Manifest {
  int schema_version = 1;
  SceneSpec scene;
  ShutterSpec shutter;
  std::vector<double> times;
  std::vector<ManifestFile> files;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// File name used for the ground-truth frame at time t, e.g. "gt_0.25.png".
std::string gt_file_name(double t);

/// Short decimal form of a time value used in file names ("0", "0.25", "1").
std::string format_time(double t);

/// Writes rs0.png, rs1.png, flow_01.flo, flow_10.flo, gt_<t>.png per time and
/// manifest.json into out_dir (created if missing).
Manifest emit_dataset(const SceneSpec& scene, const ShutterSpec& spec, const std::vector<double>& times,
                      const std::filesystem::path& out_dir);

}  // namespace rsvr
