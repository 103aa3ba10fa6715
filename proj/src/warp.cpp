#include "rsvr/warp.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace rsvr {

namespace {

constexpr int kTileRows = 16;
constexpr double kNoImportance = -std::numeric_limits<double>::infinity();

void check_inputs(const ImageBuffer& src, const FlowField& motion, const ScalarMap& importance) {
  require_same_extent(src.extent(), "source image", motion.extent(), "motion field");
  if (!importance.empty()) {
    require_same_extent(src.extent(), "source image", importance.extent(), "importance map");
  }
  for (int y = 0; y < motion.height(); ++y) {
    for (int x = 0; x < motion.width(); ++x) {
      if (!is_finite(motion.at(x, y))) {
        std::ostringstream msg;
        msg << "non-finite motion vector at pixel (" << x << ", " << y << ")";
        throw InvalidFlowError(msg.str());
      }
      if (!importance.empty() && !is_finite(importance.at(x, y))) {
        std::ostringstream msg;
        msg << "non-finite importance at pixel (" << x << ", " << y << ")";
        throw InvalidFlowError(msg.str());
      }
    }
  }
}

// Bilinear footprint of one landing point.
struct Footprint {
  int x0 = 0;
  int y0 = 0;
  std::array<double, 4> weight{};  // (x0,y0) (x0+1,y0) (x0,y0+1) (x0+1,y0+1)

  Footprint(double lx, double ly) {
    const double fx0 = std::floor(lx);
    const double fy0 = std::floor(ly);
    x0 = static_cast<int>(fx0);
    y0 = static_cast<int>(fy0);
    const double fx = lx - fx0;
    const double fy = ly - fy0;
    weight = {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy};
  }

  int x(int k) const { return x0 + (k & 1); }
  int y(int k) const { return y0 + (k >> 1); }
};

// Landing points beyond this are certainly outside the raster; clamping keeps
// the integer conversion defined for huge displacements.
double clamp_landing(double v, int extent) {
  return std::clamp(v, -2.0, static_cast<double>(extent) + 1.0);
}

// Private accumulator covering a band of target rows for one source tile.
struct Band {
  int first_row = 0;
  int rows = 0;
  std::vector<double> max_importance;
  std::vector<double> numerator;
  std::vector<double> weight;
  std::vector<double> coverage;

  bool covers(int y) const { return y >= first_row && y < first_row + rows; }
};

}  // namespace

ImageBuffer backward_warp(const ImageBuffer& img, const FlowField& flow) {
  require_same_extent(img.extent(), "image", flow.extent(), "flow");
  ImageBuffer out(img.width(), img.height(), img.channels());
  const int h = img.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const FlowVector f = flow.at(x, y);
      const Pixel p = bilinear_sample(img, x + static_cast<double>(f.u), y + static_cast<double>(f.v));
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = p[c];
    }
  }
  return out;
}

ScalarMap brightness_importance(const ImageBuffer& i0, const ImageBuffer& i1, const FlowField& f01,
                                double alpha) {
  require_same_extent(i0.extent(), "frame 0", i1.extent(), "frame 1");
  if (i0.channels() != i1.channels()) throw SizeError("frame channel counts differ");
  const ImageBuffer warped = backward_warp(i1, f01);
  ScalarMap z(i0.width(), i0.height());
  const int channels = i0.channels();
  const int h = i0.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < i0.width(); ++x) {
      double err = 0.0;
      for (int c = 0; c < channels; ++c) err += std::abs(static_cast<double>(i0.at(x, y, c)) - warped.at(x, y, c));
      z.at(x, y) = static_cast<float>(-alpha * (err / channels));
    }
  }
  return z;
}

SplatResult forward_splat(const ImageBuffer& src, const FlowField& motion, const ScalarMap& importance,
                          const SplatConfig& cfg) {
  check_inputs(src, motion, importance);
  const int w = src.width();
  const int h = src.height();
  const int channels = src.channels();
  const bool softmax = cfg.mode == SplatMode::softmax;
  const auto z_at = [&](int x, int y) { return importance.empty() ? 0.0 : static_cast<double>(importance.at(x, y)); };

  const int tiles = (h + kTileRows - 1) / kTileRows;
  std::vector<Band> bands(static_cast<std::size_t>(tiles));

  // Target row band of each tile.
#pragma omp parallel for schedule(static)
  for (int tile = 0; tile < tiles; ++tile) {
    int lo = h;
    int hi = -1;
    const int row_end = std::min(h, (tile + 1) * kTileRows);
    for (int y = tile * kTileRows; y < row_end; ++y) {
      for (int x = 0; x < w; ++x) {
        const double ly = clamp_landing(y + static_cast<double>(motion.at(x, y).v), h);
        const int y0 = static_cast<int>(std::floor(ly));
        lo = std::min(lo, y0);
        hi = std::max(hi, y0 + 1);
      }
    }
    lo = std::max(lo, 0);
    hi = std::min(hi, h - 1);
    Band& band = bands[static_cast<std::size_t>(tile)];
    band.first_row = lo;
    band.rows = std::max(0, hi - lo + 1);
  }

  // Visits every in-raster deposit of a tile in source raster order.
  const auto for_each_deposit = [&](int tile, auto&& fn) {
    const int row_end = std::min(h, (tile + 1) * kTileRows);
    for (int y = tile * kTileRows; y < row_end; ++y) {
      for (int x = 0; x < w; ++x) {
        const FlowVector m = motion.at(x, y);
        const Footprint fp(clamp_landing(x + static_cast<double>(m.u), w),
                           clamp_landing(y + static_cast<double>(m.v), h));
        for (int k = 0; k < 4; ++k) {
          const double wk = fp.weight[static_cast<std::size_t>(k)];
          const int tx = fp.x(k);
          const int ty = fp.y(k);
          if (wk <= 0.0 || tx < 0 || tx >= w || ty < 0 || ty >= h) continue;
          fn(x, y, tx, ty, wk);
        }
      }
    }
  };

  std::vector<double> max_importance;
  if (softmax) {
#pragma omp parallel for schedule(static)
    for (int tile = 0; tile < tiles; ++tile) {
      Band& band = bands[static_cast<std::size_t>(tile)];
      band.max_importance.assign(static_cast<std::size_t>(band.rows) * w, kNoImportance);
      for_each_deposit(tile, [&](int x, int y, int tx, int ty, double) {
        double& m = band.max_importance[static_cast<std::size_t>(ty - band.first_row) * w + tx];
        m = std::max(m, z_at(x, y));
      });
    }
    max_importance.assign(static_cast<std::size_t>(w) * h, kNoImportance);
#pragma omp parallel for schedule(static)
    for (int ty = 0; ty < h; ++ty) {
      for (const Band& band : bands) {
        if (!band.covers(ty)) continue;
        const std::size_t off = static_cast<std::size_t>(ty - band.first_row) * w;
        for (int tx = 0; tx < w; ++tx) {
          double& m = max_importance[static_cast<std::size_t>(ty) * w + tx];
          m = std::max(m, band.max_importance[off + tx]);
        }
      }
    }
  }

#pragma omp parallel for schedule(static)
  for (int tile = 0; tile < tiles; ++tile) {
    Band& band = bands[static_cast<std::size_t>(tile)];
    const std::size_t cells = static_cast<std::size_t>(band.rows) * w;
    band.max_importance.clear();
    band.max_importance.shrink_to_fit();
    band.numerator.assign(cells * channels, 0.0);
    band.weight.assign(cells, 0.0);
    band.coverage.assign(cells, 0.0);
    for_each_deposit(tile, [&](int x, int y, int tx, int ty, double wk) {
      const std::size_t cell = static_cast<std::size_t>(ty - band.first_row) * w + tx;
      const double weight =
          softmax ? wk * std::exp(z_at(x, y) - max_importance[static_cast<std::size_t>(ty) * w + tx]) : wk;
      for (int c = 0; c < channels; ++c) band.numerator[cell * channels + c] += weight * src.at(x, y, c);
      band.weight[cell] += weight;
      band.coverage[cell] += wk;
    });
  }

  SplatResult result{ImageBuffer(w, h, channels), ScalarMap(w, h)};
#pragma omp parallel for schedule(static)
  for (int ty = 0; ty < h; ++ty) {
    std::vector<double> numerator(static_cast<std::size_t>(w) * channels, 0.0);
    std::vector<double> weight(static_cast<std::size_t>(w), 0.0);
    std::vector<double> coverage(static_cast<std::size_t>(w), 0.0);
    for (const Band& band : bands) {
      if (!band.covers(ty)) continue;
      const std::size_t off = static_cast<std::size_t>(ty - band.first_row) * w;
      for (int tx = 0; tx < w; ++tx) {
        for (int c = 0; c < channels; ++c) {
          numerator[static_cast<std::size_t>(tx) * channels + c] += band.numerator[(off + tx) * channels + c];
        }
        weight[static_cast<std::size_t>(tx)] += band.weight[off + tx];
        coverage[static_cast<std::size_t>(tx)] += band.coverage[off + tx];
      }
    }
    for (int tx = 0; tx < w; ++tx) {
      const double cov = coverage[static_cast<std::size_t>(tx)];
      result.coverage.at(tx, ty) = static_cast<float>(cov);
      if (cov < cfg.coverage_epsilon) continue;
      for (int c = 0; c < channels; ++c) {
        result.image.at(tx, ty, c) = static_cast<float>(numerator[static_cast<std::size_t>(tx) * channels + c] /
                                                        weight[static_cast<std::size_t>(tx)]);
      }
    }
  }
  return result;
}

ScalarMap coverage_to_mask(const ScalarMap& coverage, double eps, double saturation) {
  if (!(eps > 0.0)) throw RangeError("coverage threshold must be positive");
  if (!(saturation > 0.0)) throw RangeError("coverage saturation must be positive");
  ScalarMap mask(coverage.width(), coverage.height());
  const auto in = coverage.data();
  auto out = mask.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = in[i] < eps ? 0.0f : static_cast<float>(std::min(in[i] / saturation, 1.0));
  }
  return mask;
}

}  // namespace rsvr
