#pragma once

#include "rsvr/core.hpp"

namespace rsvr {

// Bilateral motion fields (BMF): per-pixel displacements carrying RS frame 0
// and RS frame 1 onto a common GS canvas at time t, obtained by scaling the
// inter-frame optical flow with a correction map, U = C * F.

enum class BmfMode {
  abmf,  // content-independent maps C0 = t - tau0, C1 = tau1 - t
  geo,   // maps refined by the flow-derived vertical parallax term
};

struct BmfConfig {
  BmfMode mode = BmfMode::abmf;
  /// Minimum |t1 - tau| admitted by retime_bmf.
  double retime_epsilon = 1e-3;
};

/// Forward (frame 0 -> t) and backward (frame 1 -> t) correction maps.
struct CorrectionMaps {
  ScalarMap forward;
  ScalarMap backward;
};

/// C0 = t - tau0(row), C1 = tau1(row) - t. Throws RangeError for t outside [0,1].
CorrectionMaps abmf_correction_maps(const ShutterSpec& spec, double t, int width);

/// pi_v = h * f_v / (h + f_v) from the frame-0 -> frame-1 vertical flow.
/// Throws DegenerateFlowError where |h + f_v| < 1.
ScalarMap pi_from_vertical_flow(const ScalarMap& f_v, int h);

/// pi'_v = h * f'_v / (h - f'_v) from the frame-1 -> frame-0 vertical flow.
/// Equals -pi_from_vertical_flow(-f'_v). Throws DegenerateFlowError where
/// |h - f'_v| < 1.
ScalarMap pi_from_backward_vertical_flow(const ScalarMap& f_v, int h);

/// C0 = (t - tau0)(h - gamma pi_v)/h, C1 = (tau1 - t)(h + gamma pi'_v)/h.
/// Bit-identical to abmf_correction_maps wherever the vertical flow is zero.
CorrectionMaps geo_correction_maps(const ShutterSpec& spec, double t, const FlowField& f01,
                                   const FlowField& f10);

/// Dispatches on cfg.mode.
CorrectionMaps correction_maps(const ShutterSpec& spec, double t, const FlowField& f01, const FlowField& f10,
                               const BmfConfig& cfg);

/// U(x) = C(x) * F(x).
FlowField scale_flow_to_bmf(const ScalarMap& correction, const FlowField& flow);

/// U_{i->t2}(x) = (t2 - tau) / (t1 - tau) * U_{i->t1}(x), tau the row's
/// exposure time. Throws SingularRetimeError naming the first row with
/// |t1 - tau| < cfg.retime_epsilon.
FlowField retime_bmf(const FlowField& bmf, const ShutterSpec& spec, Frame frame, double t1, double t2,
                     const BmfConfig& cfg);

/// U + dU.
FlowField apply_residual(const FlowField& bmf, const FlowField& residual);

FlowField negate(const FlowField& flow);

struct VerticalRatioStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double max = 0.0;
};

/// Statistics of |f_v / (h + f_v)| over all pixels.
VerticalRatioStats vertical_ratio_stats(const FlowField& flow, int h);

}  // namespace rsvr
