#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rsvr {

// Error hierarchy. Everything thrown by the library derives from Error so
// callers (the CLI in particular) can separate input problems from bugs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class DegenerateFlowError : public Error {
 public:
  using Error::Error;
};

class SingularRetimeError : public Error {
 public:
  using Error::Error;
};

class InvalidFlowError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string field, int line, const std::string& message)
      : Error(message), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  /// 1-based line number, 0 when the error is not tied to a line.
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_ = 0;
};

struct Extent {
  int width = 0;
  int height = 0;

  std::size_t pixels() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  friend bool operator==(const Extent&, const Extent&) = default;
};

std::string to_string(Extent e);

/// Throws SizeError naming both operands when the extents differ.
void require_same_extent(Extent a, const char* a_name, Extent b, const char* b_name);

struct FlowVector {
  float u = 0.0f;  // columns, rightward
  float v = 0.0f;  // rows, downward

  friend bool operator==(const FlowVector&, const FlowVector&) = default;
};

inline bool is_finite(float x) noexcept { return std::isfinite(x); }
inline bool is_finite(FlowVector f) noexcept { return std::isfinite(f.u) && std::isfinite(f.v); }

/// Dense single-valued raster. Backs both ScalarMap (float) and FlowField
/// (FlowVector).
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{}) : extent_{checked(width, height)} {
    data_.assign(extent_.pixels(), fill);
  }
  Grid(int width, int height, std::vector<T> data) : extent_{checked(width, height)}, data_(std::move(data)) {
    if (data_.size() != extent_.pixels()) {
      throw SizeError("grid data length " + std::to_string(data_.size()) + " does not match " +
                      to_string(extent_));
    }
    for (const T& value : data_) {
      if (!is_finite(value)) throw RangeError("grid data contains a non-finite value");
    }
  }

  int width() const noexcept { return extent_.width; }
  int height() const noexcept { return extent_.height; }
  Extent extent() const noexcept { return extent_; }
  bool empty() const noexcept { return data_.empty(); }

  const T& at(int x, int y) const { return data_[index(x, y)]; }
  T& at(int x, int y) { return data_[index(x, y)]; }

  std::span<const T> data() const noexcept { return data_; }
  std::span<T> data() noexcept { return data_; }

  std::span<const T> row(int y) const {
    return std::span<const T>(data_).subspan(static_cast<std::size_t>(y) * extent_.width, extent_.width);
  }
  std::span<T> row(int y) {
    return std::span<T>(data_).subspan(static_cast<std::size_t>(y) * extent_.width, extent_.width);
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static Extent checked(int width, int height) {
    if (width < 0 || height < 0) throw SizeError("negative raster dimensions");
    return {width, height};
  }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * extent_.width + static_cast<std::size_t>(x);
  }

  Extent extent_;
  std::vector<T> data_;
};

/// Per-pixel scalar: correction maps, masks, coverage, importance.
using ScalarMap = Grid<float>;
/// Per-pixel displacement in pixels.
using FlowField = Grid<FlowVector>;

/// Channel vector returned by point sampling (1 or 3 channels used).
struct Pixel {
  std::array<float, 3> values{};
  int channels = 0;

  float operator[](int c) const { return values[static_cast<std::size_t>(c)]; }
};

/// Row-major H x W x C raster of 32-bit floats, linear intensity in [0,1].
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels, float fill = 0.0f);
  ImageBuffer(int width, int height, int channels, std::vector<float> data);

  int width() const noexcept { return extent_.width; }
  int height() const noexcept { return extent_.height; }
  int channels() const noexcept { return channels_; }
  Extent extent() const noexcept { return extent_; }
  bool empty() const noexcept { return data_.empty(); }

  float at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }
  float& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  std::span<const float> row(int y) const;
  std::span<float> row(int y);

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * extent_.width + static_cast<std::size_t>(x)) * channels_ +
           static_cast<std::size_t>(c);
  }

  Extent extent_;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Rolling-shutter readout geometry: scanline count and readout time ratio.
struct ShutterSpec {
  int height = 0;
  double gamma = 1.0;

  ShutterSpec() = default;
  ShutterSpec(int height, double gamma = 1.0);

  friend bool operator==(const ShutterSpec&, const ShutterSpec&) = default;
};

/// Which of the two consecutive RS frames; also its time offset.
enum class Frame : int { first = 0, second = 1 };

constexpr int index(Frame f) noexcept { return static_cast<int>(f); }

/// Bilinear interpolation with border clamping. Total for non-empty images.
Pixel bilinear_sample(const ImageBuffer& img, double x, double y);

/// Extracts one flow component as a scalar map.
ScalarMap vertical_component(const FlowField& flow);
ScalarMap horizontal_component(const FlowField& flow);

/// Worker count used by the OpenMP kernels. Outputs never depend on it.
void set_num_threads(int n);
int num_threads();

}  // namespace rsvr
