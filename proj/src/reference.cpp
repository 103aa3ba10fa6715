// Straightforward serial kernels: one pass over sources, accumulation
// directly into full-size buffers. The tiled OpenMP kernels are tested
// against these.

#include <algorithm>
#include <limits>
#include <sstream>

#include "rsvr/warp.hpp"

namespace rsvr::reference {

ImageBuffer backward_warp(const ImageBuffer& img, const FlowField& flow) {
  require_same_extent(img.extent(), "image", flow.extent(), "flow");
  ImageBuffer out(img.width(), img.height(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const FlowVector f = flow.at(x, y);
      const Pixel p = bilinear_sample(img, x + static_cast<double>(f.u), y + static_cast<double>(f.v));
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = p[c];
    }
  }
  return out;
}

SplatResult forward_splat(const ImageBuffer& src, const FlowField& motion, const ScalarMap& importance,
                          const SplatConfig& cfg) {
  require_same_extent(src.extent(), "source image", motion.extent(), "motion field");
  const int w = src.width();
  const int h = src.height();
  const int channels = src.channels();
  const bool softmax = cfg.mode == SplatMode::softmax;
  const auto z = [&](int x, int y) { return importance.empty() ? 0.0 : static_cast<double>(importance.at(x, y)); };
  const auto cell = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

  struct Deposit {
    int tx, ty;
    double weight;
  };
  const auto deposits = [&](int x, int y) {
    const FlowVector m = motion.at(x, y);
    if (!is_finite(m)) {
      std::ostringstream msg;
      msg << "non-finite motion vector at pixel (" << x << ", " << y << ")";
      throw InvalidFlowError(msg.str());
    }
    const double lx = std::clamp(x + static_cast<double>(m.u), -2.0, w + 1.0);
    const double ly = std::clamp(y + static_cast<double>(m.v), -2.0, h + 1.0);
    const int x0 = static_cast<int>(std::floor(lx));
    const int y0 = static_cast<int>(std::floor(ly));
    const double fx = lx - x0;
    const double fy = ly - y0;
    std::vector<Deposit> out;
    const Deposit all[4] = {{x0, y0, (1 - fx) * (1 - fy)},
                            {x0 + 1, y0, fx * (1 - fy)},
                            {x0, y0 + 1, (1 - fx) * fy},
                            {x0 + 1, y0 + 1, fx * fy}};
    for (const Deposit& d : all) {
      if (d.weight > 0.0 && d.tx >= 0 && d.tx < w && d.ty >= 0 && d.ty < h) out.push_back(d);
    }
    return out;
  };

  std::vector<double> zmax(static_cast<std::size_t>(w) * h, -std::numeric_limits<double>::infinity());
  if (softmax) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (const Deposit& d : deposits(x, y)) zmax[cell(d.tx, d.ty)] = std::max(zmax[cell(d.tx, d.ty)], z(x, y));
      }
    }
  }

  std::vector<double> numerator(static_cast<std::size_t>(w) * h * channels, 0.0);
  std::vector<double> weight(static_cast<std::size_t>(w) * h, 0.0);
  std::vector<double> coverage(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (const Deposit& d : deposits(x, y)) {
        const std::size_t q = cell(d.tx, d.ty);
        const double wt = softmax ? d.weight * std::exp(z(x, y) - zmax[q]) : d.weight;
        for (int c = 0; c < channels; ++c) numerator[q * channels + c] += wt * src.at(x, y, c);
        weight[q] += wt;
        coverage[q] += d.weight;
      }
    }
  }

  SplatResult result{ImageBuffer(w, h, channels), ScalarMap(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t q = cell(x, y);
      result.coverage.at(x, y) = static_cast<float>(coverage[q]);
      if (coverage[q] < cfg.coverage_epsilon) continue;
      for (int c = 0; c < channels; ++c) {
        result.image.at(x, y, c) = static_cast<float>(numerator[q * channels + c] / weight[q]);
      }
    }
  }
  return result;
}

}  // namespace rsvr::reference
