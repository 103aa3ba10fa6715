#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "rsvr/core.hpp"
#include "rsvr/simulator.hpp"

namespace rsvr::test {

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "rsvr") {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline ImageBuffer random_image(int w, int h, int channels, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> dist(0.0f, 1.0f);
  std::vector<float> data(static_cast<std::size_t>(w) * h * channels);
  for (float& v : data) v = dist(rng);
  return ImageBuffer(w, h, channels, std::move(data));
}

inline FlowField random_flow(int w, int h, float amplitude, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> dist(-amplitude, amplitude);
  FlowField f(w, h);
  for (FlowVector& v : f.data()) v = {dist(rng), dist(rng)};
  return f;
}

inline FlowField constant_flow(int w, int h, float u, float v) { return FlowField(w, h, FlowVector{u, v}); }

inline double max_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(a.data()[i]) - b.data()[i]));
  }
  return m;
}

inline TextureSpec checker_texture(double period, double contrast) {
  TextureSpec t;
  t.kind = TextureKind::checkerboard;
  t.period = period;
  t.contrast = contrast;
  return t;
}

inline TextureSpec noise_texture(std::uint64_t seed, double scale) {
  TextureSpec t;
  t.kind = TextureKind::value_noise;
  t.seed = seed;
  t.scale = scale;
  return t;
}

// Value-noise plus checkerboard plane used by the end-to-end benchmarks.
inline SceneSpec pan_scene(double vx, double vy, int size = 256) {
  SceneSpec scene;
  scene.width = size;
  scene.height = size;
  scene.supersample = 2;
  scene.texture.kind = TextureKind::noise_checker;
  scene.texture.seed = 7;
  scene.texture.scale = 16.0;
  scene.texture.period = 32.0;
  scene.texture.contrast = 0.25;
  scene.motion.background = {vx, vy};
  return scene;
}

}  // namespace rsvr::test
