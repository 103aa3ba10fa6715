#include "rsvr/bmf.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "rsvr/shutter.hpp"

namespace rsvr {

namespace {

void require_unit_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream msg;
    msg << "t out of [0,1]: " << t;
    throw RangeError(msg.str());
  }
}

[[noreturn]] void throw_degenerate(int x, int y, float f_v, double denominator) {
  std::ostringstream msg;
  msg << "degenerate vertical flow " << f_v << " at pixel (" << x << ", " << y << "): |denominator| = "
      << std::abs(denominator) << " < 1";
  throw DegenerateFlowError(msg.str());
}

// sign = +1: h f / (h + f); sign = -1: h f / (h - f).
ScalarMap pi_map(const ScalarMap& f_v, int h, double sign) {
  ScalarMap out(f_v.width(), f_v.height());
  for (int y = 0; y < f_v.height(); ++y) {
    for (int x = 0; x < f_v.width(); ++x) {
      const float f = f_v.at(x, y);
      const double denominator = h + sign * f;
      if (std::abs(denominator) < 1.0) throw_degenerate(x, y, f, denominator);
      out.at(x, y) = f == 0.0f ? 0.0f : static_cast<float>(h * static_cast<double>(f) / denominator);
    }
  }
  return out;
}

}  // namespace

CorrectionMaps abmf_correction_maps(const ShutterSpec& spec, double t, int width) {
  require_unit_time(t);
  if (width < 1) throw SizeError("correction map width must be >= 1");
  CorrectionMaps maps{ScalarMap(width, spec.height), ScalarMap(width, spec.height)};
  for (int y = 0; y < spec.height; ++y) {
    const double tau0 = scanline_to_time(spec, Frame::first, y);
    const double tau1 = scanline_to_time(spec, Frame::second, y);
    std::ranges::fill(maps.forward.row(y), static_cast<float>(t - tau0));
    std::ranges::fill(maps.backward.row(y), static_cast<float>(tau1 - t));
  }
  return maps;
}

ScalarMap pi_from_vertical_flow(const ScalarMap& f_v, int h) {
  return pi_map(f_v, h, +1.0);
}

ScalarMap pi_from_backward_vertical_flow(const ScalarMap& f_v, int h) {
  return pi_map(f_v, h, -1.0);
}

CorrectionMaps geo_correction_maps(const ShutterSpec& spec, double t, const FlowField& f01,
                                   const FlowField& f10) {
  require_unit_time(t);
  require_same_extent(f01.extent(), "flow01", f10.extent(), "flow10");
  if (f01.height() != spec.height) {
    throw SizeError("flow height " + std::to_string(f01.height()) + " does not match shutter height " +
                    std::to_string(spec.height));
  }
  const ScalarMap pi = pi_from_vertical_flow(vertical_component(f01), spec.height);
  const ScalarMap pi_back = pi_from_backward_vertical_flow(vertical_component(f10), spec.height);

  const int w = f01.width();
  const double h = spec.height;
  CorrectionMaps maps{ScalarMap(w, spec.height), ScalarMap(w, spec.height)};
  for (int y = 0; y < spec.height; ++y) {
    const double c0 = t - scanline_to_time(spec, Frame::first, y);
    const double c1 = scanline_to_time(spec, Frame::second, y) - t;
    for (int x = 0; x < w; ++x) {
      // With pi == 0 the parallax factor is exactly 1, so the product
      // reproduces the approximated map bit for bit.
      const double forward_factor = (h - spec.gamma * pi.at(x, y)) / h;
      const double backward_factor = (h + spec.gamma * pi_back.at(x, y)) / h;
      maps.forward.at(x, y) = static_cast<float>(c0 * forward_factor);
      maps.backward.at(x, y) = static_cast<float>(c1 * backward_factor);
    }
  }
  return maps;
}

CorrectionMaps correction_maps(const ShutterSpec& spec, double t, const FlowField& f01, const FlowField& f10,
                               const BmfConfig& cfg) {
  if (cfg.mode == BmfMode::geo) return geo_correction_maps(spec, t, f01, f10);
  require_same_extent(f01.extent(), "flow01", f10.extent(), "flow10");
  return abmf_correction_maps(spec, t, f01.width());
}

FlowField scale_flow_to_bmf(const ScalarMap& correction, const FlowField& flow) {
  require_same_extent(correction.extent(), "correction map", flow.extent(), "flow");
  FlowField out(flow.width(), flow.height());
  const auto c = correction.data();
  const auto f = flow.data();
  auto u = out.data();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double scale = c[i];
    u[i] = {static_cast<float>(scale * f[i].u), static_cast<float>(scale * f[i].v)};
  }
  return out;
}

FlowField retime_bmf(const FlowField& bmf, const ShutterSpec& spec, Frame frame, double t1, double t2,
                     const BmfConfig& cfg) {
  if (bmf.height() != spec.height) {
    throw SizeError("motion field height " + std::to_string(bmf.height()) + " does not match shutter height " +
                    std::to_string(spec.height));
  }
  FlowField out(bmf.width(), bmf.height());
  for (int y = 0; y < bmf.height(); ++y) {
    const double tau = scanline_to_time(spec, frame, y);
    if (std::abs(t1 - tau) < cfg.retime_epsilon) {
      std::ostringstream msg;
      msg << "singular retiming at row " << y << ": |t1 - tau| = " << std::abs(t1 - tau) << " < "
          << cfg.retime_epsilon;
      throw SingularRetimeError(msg.str());
    }
    const double factor = (t2 - tau) / (t1 - tau);
    const auto src = bmf.row(y);
    auto dst = out.row(y);
    for (std::size_t x = 0; x < src.size(); ++x) {
      dst[x] = {static_cast<float>(factor * src[x].u), static_cast<float>(factor * src[x].v)};
    }
  }
  return out;
}

FlowField apply_residual(const FlowField& bmf, const FlowField& residual) {
  require_same_extent(bmf.extent(), "motion field", residual.extent(), "residual");
  FlowField out = bmf;
  auto dst = out.data();
  const auto d = residual.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i].u += d[i].u;
    dst[i].v += d[i].v;
  }
  return out;
}

FlowField negate(const FlowField& flow) {
  FlowField out = flow;
  for (auto& f : out.data()) f = {-f.u, -f.v};
  return out;
}

VerticalRatioStats vertical_ratio_stats(const FlowField& flow, int h) {
  VerticalRatioStats stats;
  if (flow.empty()) return stats;
  std::vector<double> ratios;
  ratios.reserve(flow.extent().pixels());
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      const float f = flow.at(x, y).v;
      const double denominator = h + static_cast<double>(f);
      if (std::abs(denominator) < 1.0) throw_degenerate(x, y, f, denominator);
      ratios.push_back(std::abs(f / denominator));
    }
  }
  const auto n = static_cast<double>(ratios.size());
  double sum = 0.0;
  for (double r : ratios) {
    sum += r;
    stats.max = std::max(stats.max, r);
  }
  stats.mean = sum / n;
  double sum_sq = 0.0;
  for (double r : ratios) sum_sq += (r - stats.mean) * (r - stats.mean);
  stats.std = std::sqrt(sum_sq / n);
  return stats;
}

}  // namespace rsvr
