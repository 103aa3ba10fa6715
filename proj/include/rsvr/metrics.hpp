#pragma once

#include "rsvr/core.hpp"

namespace rsvr {

/// PSNR reported for identical images.
inline constexpr double kPsnrCapDb = 99.0;

// Masks: a pixel is included when its mask value is >= 0.5. An empty
// selection throws EvaluationError.

/// Mean absolute error over pixels and channels.
double l1_loss(const ImageBuffer& pred, const ImageBuffer& gt);
double l1_loss(const ImageBuffer& pred, const ImageBuffer& gt, const ScalarMap& mask);

double mean_squared_error(const ImageBuffer& pred, const ImageBuffer& gt);
double mean_squared_error(const ImageBuffer& pred, const ImageBuffer& gt, const ScalarMap& mask);

/// -10 log10(mse) with peak 1, capped at kPsnrCapDb.
double psnr_from_mse(double mse);
double psnr(const ImageBuffer& pred, const ImageBuffer& gt);
double psnr(const ImageBuffer& pred, const ImageBuffer& gt, const ScalarMap& mask);

/// Mean structural similarity of the channel-mean images: 11x11 Gaussian
/// window (sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic range 1, evaluated at
/// every window position fully inside the image.
double ssim(const ImageBuffer& pred, const ImageBuffer& gt);

/// Mean of the two candidates' L1 errors against the ground truth.
double contextual_consistency(const ImageBuffer& i0t, const ImageBuffer& i1t, const ImageBuffer& gt);

/// Mean per-pixel L2 norm of the forward-difference gradients of both flow
/// components; the last row/column use backward differences.
double tv_energy(const FlowField& flow);

}  // namespace rsvr
