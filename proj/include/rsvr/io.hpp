#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rsvr/bmf.hpp"
#include "rsvr/core.hpp"
#include "rsvr/simulator.hpp"

namespace rsvr {

// Images: 8-bit PNG (gray or RGB) and binary PGM/PPM (maxval 255). A byte n
// reads as n/255; writing rounds to nearest, ties to even.
ImageBuffer read_image(const std::filesystem::path& path);
void write_image(const ImageBuffer& img, const std::filesystem::path& path);

/// Single-channel map written as a gray image (values clamped to [0,1]).
void write_mask(const ScalarMap& mask, const std::filesystem::path& path);
/// Gray image read back as a map; RGB images are averaged over channels.
ScalarMap read_mask(const std::filesystem::path& path);

// Middlebury .flo: float 202021.25 ("PIEH"), int32 width, int32 height, then
// interleaved (u, v) float32 pairs, row-major, all little-endian.
FlowField read_flo(const std::filesystem::path& path);
void write_flo(const FlowField& flow, const std::filesystem::path& path);
std::vector<unsigned char> encode_flo(const FlowField& flow);
FlowField decode_flo(const std::vector<unsigned char>& bytes, const std::string& source);

// Scene description: line-oriented `key = value` text with `#` comments.
// Unknown, duplicate and missing keys are errors (ParseError with the field
// and line).
struct SceneDescription {
  SceneSpec scene;
  ShutterSpec shutter;

  friend bool operator==(const SceneDescription&, const SceneDescription&) = default;
};

SceneDescription parse_scene_spec(const std::string& text, const std::string& source = "<memory>");
std::string format_scene_spec(const SceneSpec& scene, const ShutterSpec& shutter);
SceneDescription read_scene_spec(const std::filesystem::path& path);
void write_scene_spec(const SceneSpec& scene, const ShutterSpec& shutter, const std::filesystem::path& path);

/// Dataset manifest (JSON).
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct FrameMetrics {
  std::string name;
  std::optional<double> t;
  double psnr_db = 0.0;
  double psnr_masked_db = 0.0;
  double ssim = 0.0;
  double l1 = 0.0;
  double hole_fraction = 0.0;
  double mse = 0.0;
  double mse_masked = 0.0;
};

struct MetricsReport {
  std::string kind = "evaluation";
  std::vector<FrameMetrics> entries;
  std::optional<FrameMetrics> mean;
};

/// JSON text with stable key order and numbers rounded to 6 significant digits.
std::string format_report(const MetricsReport& report);
void write_report(const MetricsReport& report, const std::filesystem::path& path);
MetricsReport read_report(const std::filesystem::path& path);

struct FlowAnalysisReport {
  std::string flow;
  int height = 0;
  VerticalRatioStats stats;
};

std::string format_flow_analysis(const FlowAnalysisReport& report);

struct VideoFrameEntry {
  int index = 0;
  double t = 0.0;
  std::string file;
  double hole_fraction = 0.0;
};

std::string format_video_report(const std::vector<VideoFrameEntry>& frames);

/// Rounds to 6 significant digits (the precision reports carry).
double round_significant(double value, int digits = 6);

/// Writes text to a file, throwing IoError with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace rsvr
