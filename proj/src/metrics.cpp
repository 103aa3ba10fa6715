#include "rsvr/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace rsvr {

namespace {

void check_pair(const ImageBuffer& pred, const ImageBuffer& gt) {
  require_same_extent(pred.extent(), "prediction", gt.extent(), "ground truth");
  if (pred.channels() != gt.channels()) {
    throw SizeError("channel mismatch: prediction has " + std::to_string(pred.channels()) + ", ground truth has " +
                    std::to_string(gt.channels()));
  }
}

// Accumulates f(|pred - gt|) over the included pixels; returns the mean.
template <typename F>
double masked_mean(const ImageBuffer& pred, const ImageBuffer& gt, const ScalarMap* mask, F&& f) {
  check_pair(pred, gt);
  if (mask) require_same_extent(pred.extent(), "prediction", mask->extent(), "mask");
  const int channels = pred.channels();
  const auto a = pred.data();
  const auto b = gt.data();
  const std::size_t pixels = pred.extent().pixels();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < pixels; ++i) {
    if (mask && mask->data()[i] < 0.5f) continue;
    for (int c = 0; c < channels; ++c) {
      const std::size_t k = i * channels + c;
      sum += f(static_cast<double>(a[k]) - b[k]);
    }
    count += static_cast<std::size_t>(channels);
  }
  if (count == 0) throw EvaluationError("evaluation mask selects no pixels");
  return sum / static_cast<double>(count);
}

constexpr auto kAbs = [](double d) { return std::abs(d); };
constexpr auto kSquare = [](double d) { return d * d; };

std::vector<double> channel_mean(const ImageBuffer& img) {
  std::vector<double> out(img.extent().pixels());
  const int channels = img.channels();
  const auto data = img.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < channels; ++c) s += data[i * channels + c];
    out[i] = s / channels;
  }
  return out;
}

constexpr int kWindow = 11;

std::array<double, kWindow> gaussian_kernel() {
  std::array<double, kWindow> k{};
  constexpr double sigma = 1.5;
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    k[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += k[static_cast<std::size_t>(i)];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable 'valid' Gaussian filtering of a w x h plane.
std::vector<double> filter_valid(const std::vector<double>& plane, int w, int h) {
  static const auto kernel = gaussian_kernel();
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> horizontal(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += kernel[static_cast<std::size_t>(k)] * plane[static_cast<std::size_t>(y) * w + x + k];
      horizontal[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) {
        s += kernel[static_cast<std::size_t>(k)] * horizontal[static_cast<std::size_t>(y + k) * ow + x];
      }
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

double l1_loss(const ImageBuffer& pred, const ImageBuffer& gt) {
  return masked_mean(pred, gt, nullptr, kAbs);
}

double l1_loss(const ImageBuffer& pred, const ImageBuffer& gt, const ScalarMap& mask) {
  return masked_mean(pred, gt, &mask, kAbs);
}

double mean_squared_error(const ImageBuffer& pred, const ImageBuffer& gt) {
  return masked_mean(pred, gt, nullptr, kSquare);
}

double mean_squared_error(const ImageBuffer& pred, const ImageBuffer& gt, const ScalarMap& mask) {
  return masked_mean(pred, gt, &mask, kSquare);
}

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, -10.0 * std::log10(mse));
}

double psnr(const ImageBuffer& pred, const ImageBuffer& gt) {
  return psnr_from_mse(mean_squared_error(pred, gt));
}

double psnr(const ImageBuffer& pred, const ImageBuffer& gt, const ScalarMap& mask) {
  return psnr_from_mse(mean_squared_error(pred, gt, mask));
}

double ssim(const ImageBuffer& pred, const ImageBuffer& gt) {
  check_pair(pred, gt);
  const int w = pred.width();
  const int h = pred.height();
  if (w < kWindow || h < kWindow) {
    throw EvaluationError("SSIM needs at least 11x11 pixels, got " + to_string(pred.extent()));
  }
  const std::vector<double> x = channel_mean(pred);
  const std::vector<double> y = channel_mean(gt);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mu_x = filter_valid(x, w, h);
  const auto mu_y = filter_valid(y, w, h);
  const auto e_xx = filter_valid(xx, w, h);
  const auto e_yy = filter_valid(yy, w, h);
  const auto e_xy = filter_valid(xy, w, h);

  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  double sum = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double vx = e_xx[i] - mx * mx;
    const double vy = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    sum += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return sum / static_cast<double>(mu_x.size());
}

double contextual_consistency(const ImageBuffer& i0t, const ImageBuffer& i1t, const ImageBuffer& gt) {
  return 0.5 * (l1_loss(i0t, gt) + l1_loss(i1t, gt));
}

double tv_energy(const FlowField& flow) {
  const int w = flow.width();
  const int h = flow.height();
  if (w < 2 || h < 2) throw SizeError("tv_energy needs at least 2x2 pixels, got " + to_string(flow.extent()));
  double sum = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int xa = x + 1 < w ? x : x - 1;
      const int ya = y + 1 < h ? y : y - 1;
      const FlowVector dx0 = flow.at(xa, y);
      const FlowVector dx1 = flow.at(xa + 1, y);
      const FlowVector dy0 = flow.at(x, ya);
      const FlowVector dy1 = flow.at(x, ya + 1);
      const double dux = static_cast<double>(dx1.u) - dx0.u;
      const double dvx = static_cast<double>(dx1.v) - dx0.v;
      const double duy = static_cast<double>(dy1.u) - dy0.u;
      const double dvy = static_cast<double>(dy1.v) - dy0.v;
      sum += std::sqrt(dux * dux + dvx * dvx + duy * duy + dvy * dvy);
    }
  }
  return sum / static_cast<double>(flow.extent().pixels());
}

}  // namespace rsvr
