#include "rsvr/core.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rsvr {

std::string to_string(Extent e) {
  return std::to_string(e.width) + "x" + std::to_string(e.height);
}

void require_same_extent(Extent a, const char* a_name, Extent b, const char* b_name) {
  if (a != b) {
    throw SizeError(std::string("dimension mismatch: ") + a_name + " (" + to_string(a) + ") vs " + b_name +
                    " (" + to_string(b) + ")");
  }
}

namespace {

void check_channels(int channels) {
  if (channels != 1 && channels != 3) {
    throw SizeError("image channel count must be 1 or 3, got " + std::to_string(channels));
  }
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels, float fill) : channels_(channels) {
  if (width < 0 || height < 0) throw SizeError("negative image dimensions");
  check_channels(channels);
  if (!(fill >= 0.0f && fill <= 1.0f)) throw RangeError("image fill value must lie in [0,1]");
  extent_ = {width, height};
  data_.assign(extent_.pixels() * static_cast<std::size_t>(channels), fill);
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<float> data)
    : channels_(channels), data_(std::move(data)) {
  if (width < 0 || height < 0) throw SizeError("negative image dimensions");
  check_channels(channels);
  extent_ = {width, height};
  const std::size_t expected = extent_.pixels() * static_cast<std::size_t>(channels);
  if (data_.size() != expected) {
    throw SizeError("image data length " + std::to_string(data_.size()) + " does not match " +
                    to_string(extent_) + "x" + std::to_string(channels));
  }
  if (!std::all_of(data_.begin(), data_.end(), [](float v) { return v >= 0.0f && v <= 1.0f; })) {
    throw RangeError("image data must be finite and lie in [0,1]");
  }
}

std::span<const float> ImageBuffer::row(int y) const {
  const std::size_t stride = static_cast<std::size_t>(extent_.width) * channels_;
  return std::span<const float>(data_).subspan(static_cast<std::size_t>(y) * stride, stride);
}

std::span<float> ImageBuffer::row(int y) {
  const std::size_t stride = static_cast<std::size_t>(extent_.width) * channels_;
  return std::span<float>(data_).subspan(static_cast<std::size_t>(y) * stride, stride);
}

ShutterSpec::ShutterSpec(int h, double g) : height(h), gamma(g) {
  if (h < 2) throw RangeError("shutter height must be >= 2, got " + std::to_string(h));
  if (!(g > 0.0 && g <= 1.0)) throw RangeError("readout ratio gamma must lie in (0,1], got " + std::to_string(g));
}

Pixel bilinear_sample(const ImageBuffer& img, double x, double y) {
  const int w = img.width();
  const int h = img.height();
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0;
  const double fy = y - y0;

  Pixel out;
  out.channels = img.channels();
  for (int c = 0; c < img.channels(); ++c) {
    const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
    const double bottom = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
    out.values[static_cast<std::size_t>(c)] = static_cast<float>((1.0 - fy) * top + fy * bottom);
  }
  return out;
}

ScalarMap vertical_component(const FlowField& flow) {
  ScalarMap out(flow.width(), flow.height());
  std::transform(flow.data().begin(), flow.data().end(), out.data().begin(),
                 [](FlowVector f) { return f.v; });
  return out;
}

ScalarMap horizontal_component(const FlowField& flow) {
  ScalarMap out(flow.width(), flow.height());
  std::transform(flow.data().begin(), flow.data().end(), out.data().begin(),
                 [](FlowVector f) { return f.u; });
  return out;
}

void set_num_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(std::max(1, n));
#else
  (void)n;
#endif
}

int num_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace rsvr
