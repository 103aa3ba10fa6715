#include "rsvr/shutter.hpp"

#include <algorithm>
#include <sstream>

namespace rsvr {

double scanline_to_time_unchecked(const ShutterSpec& spec, Frame frame, double s) noexcept {
  const double h = spec.height;
  return spec.gamma / h * (s - h / 2.0) + index(frame);
}

double scanline_to_time(const ShutterSpec& spec, Frame frame, double s) {
  if (!(s >= 0.0 && s <= spec.height - 1)) {
    std::ostringstream msg;
    msg << "scanline " << s << " outside [0, " << spec.height - 1 << "]";
    throw RangeError(msg.str());
  }
  return scanline_to_time_unchecked(spec, frame, s);
}

double time_to_scanline(const ShutterSpec& spec, Frame frame, double t) {
  const double lo = scanline_to_time_unchecked(spec, frame, 0.0);
  const double hi = scanline_to_time_unchecked(spec, frame, spec.height - 1);
  if (!(t >= lo && t <= hi)) {
    std::ostringstream msg;
    msg << "time " << t << " outside exposure window [" << lo << ", " << hi << "] of frame " << index(frame);
    throw RangeError(msg.str());
  }
  const double h = spec.height;
  const double s = (t - index(frame)) * h / spec.gamma + h / 2.0;
  return std::clamp(s, 0.0, h - 1.0);
}

ScalarMap exposure_time_map(const ShutterSpec& spec, Frame frame, int width) {
  if (width < 1) throw SizeError("exposure_time_map width must be >= 1");
  ScalarMap out(width, spec.height);
  for (int y = 0; y < spec.height; ++y) {
    const auto tau = static_cast<float>(scanline_to_time(spec, frame, y));
    std::ranges::fill(out.row(y), tau);
  }
  return out;
}

}  // namespace rsvr
