#pragma once

#include "rsvr/core.hpp"

namespace rsvr {

// Scanline <-> time mapping under readout ratio gamma. The central scanline
// s = h/2 of frame i is exposed at time i; scanline 0 at i - gamma/2.

/// t = (gamma / h) * (s - h/2) + frame. Throws RangeError for s outside [0, h-1].
double scanline_to_time(const ShutterSpec& spec, Frame frame, double s);

/// Same mapping without the range check; used where landing rows may fall
/// outside the raster (flow oracles).
double scanline_to_time_unchecked(const ShutterSpec& spec, Frame frame, double s) noexcept;

/// Inverse of scanline_to_time. Throws RangeError outside the exposure window.
double time_to_scanline(const ShutterSpec& spec, Frame frame, double t);

/// Per-pixel exposure time; constant along rows.
ScalarMap exposure_time_map(const ShutterSpec& spec, Frame frame, int width);

}  // namespace rsvr
