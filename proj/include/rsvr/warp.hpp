#pragma once

#include "rsvr/core.hpp"

namespace rsvr {

enum class SplatMode {
  sum,      // plain bilinear splatting, every deposit weighs its bilinear weight
  softmax,  // deposits additionally weighted by exp(Z - max Z at the target)
};

struct SplatConfig {
  SplatMode mode = SplatMode::softmax;
  /// Sharpness of the brightness importance metric feeding softmax mode.
  double alpha = 50.0;
  /// Target pixels with accumulated bilinear weight below this are holes.
  double coverage_epsilon = 1e-4;
};

struct SplatResult {
  ImageBuffer image;
  /// Accumulated bilinear weight per target pixel (1 for an undisturbed grid).
  ScalarMap coverage;
};

/// out(x) = bilinear_sample(img, x + flow(x)).
ImageBuffer backward_warp(const ImageBuffer& img, const FlowField& flow);

/// Z(x) = -alpha * mean_c |I0(x) - backward_warp(I1, F01)(x)|. Always <= 0.
ScalarMap brightness_importance(const ImageBuffer& i0, const ImageBuffer& i1, const FlowField& f01,
                                double alpha);

/// Forward warping: each source pixel p lands at p + U(p) and deposits its
/// bilinear weights on the four surrounding target pixels. Deposits outside
/// the raster are dropped. In softmax mode each deposit is further weighted
/// by exp(Z(p) - Zmax(q)), Zmax(q) being the largest importance among the
/// sources reaching target q; an empty `importance` is read as all zeros.
///
/// The source raster is cut into fixed row tiles that accumulate into
/// private bands merged in tile order, so the result is bit-identical for
/// any worker count.
///
/// Throws InvalidFlowError on a non-finite motion vector or importance.
SplatResult forward_splat(const ImageBuffer& src, const FlowField& motion, const ScalarMap& importance,
                          const SplatConfig& cfg);

/// mask = min(coverage / saturation, 1), hard zero below eps.
ScalarMap coverage_to_mask(const ScalarMap& coverage, double eps, double saturation = 1.0);

/// Serial implementations kept as the baseline for tests and benchmarks.
namespace reference {

ImageBuffer backward_warp(const ImageBuffer& img, const FlowField& flow);

SplatResult forward_splat(const ImageBuffer& src, const FlowField& motion, const ScalarMap& importance,
                          const SplatConfig& cfg);

}  // namespace reference

}  // namespace rsvr
