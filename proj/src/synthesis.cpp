#include "rsvr/synthesis.hpp"

#include <sstream>

namespace rsvr {

namespace {

void require_unit_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream msg;
    msg << "t out of [0,1]: " << t;
    throw RangeError(msg.str());
  }
}

struct Importance {
  ScalarMap forward;
  ScalarMap backward;
};

void check_pipeline_inputs(const ImageBuffer& rs0, const ImageBuffer& rs1, const FlowField& f01,
                           const FlowField& f10, const ShutterSpec& spec) {
  require_same_extent(rs0.extent(), "rs0", rs1.extent(), "rs1");
  require_same_extent(rs0.extent(), "rs0", f01.extent(), "flow01");
  require_same_extent(rs0.extent(), "rs0", f10.extent(), "flow10");
  if (rs0.channels() != rs1.channels()) {
    throw SizeError("channel mismatch: rs0 has " + std::to_string(rs0.channels()) + ", rs1 has " +
                    std::to_string(rs1.channels()));
  }
  if (rs0.height() != spec.height) {
    throw SizeError("image height " + std::to_string(rs0.height()) + " does not match shutter height " +
                    std::to_string(spec.height));
  }
}

Importance importance_maps(const ImageBuffer& rs0, const ImageBuffer& rs1, const FlowField& f01,
                           const FlowField& f10, const SplatConfig& splat) {
  if (splat.mode != SplatMode::softmax) return {};
  return {brightness_importance(rs0, rs1, f01, splat.alpha), brightness_importance(rs1, rs0, f10, splat.alpha)};
}

ReconstructionResult reconstruct_with(const ImageBuffer& rs0, const ImageBuffer& rs1, const FlowField& f01,
                                      const FlowField& f10, double t, const ShutterSpec& spec,
                                      const ReconstructionConfig& cfg, const Importance& importance,
                                      const std::optional<BmfResiduals>& residuals) {
  require_unit_time(t);
  ReconstructionResult result;
  result.t = t;

  const CorrectionMaps maps = correction_maps(spec, t, f01, f10, cfg.bmf);
  result.bmf[0] = scale_flow_to_bmf(maps.forward, f01);
  result.bmf[1] = scale_flow_to_bmf(maps.backward, f10);
  if (residuals) {
    result.bmf[0] = apply_residual(result.bmf[0], residuals->forward);
    result.bmf[1] = apply_residual(result.bmf[1], residuals->backward);
  }

  SplatResult splat0 = forward_splat(rs0, result.bmf[0], importance.forward, cfg.splat);
  SplatResult splat1 = forward_splat(rs1, result.bmf[1], importance.backward, cfg.splat);

  OcclusionMasks masks =
      derive_occlusion_masks(splat0.coverage, splat1.coverage, cfg.mask_mode, cfg.splat.coverage_epsilon);
  FusionResult fused = fuse(splat0.image, splat1.image, masks.forward, masks.backward, t, cfg.fusion_epsilon);

  const auto cov0 = splat0.coverage.data();
  const auto cov1 = splat1.coverage.data();
  auto holes = fused.hole_mask.data();
  const int channels = fused.image.channels();
  auto pixels = fused.image.data();
  for (std::size_t i = 0; i < holes.size(); ++i) {
    if (cov0[i] < cfg.splat.coverage_epsilon && cov1[i] < cfg.splat.coverage_epsilon) {
      holes[i] = 1.0f;
      for (int c = 0; c < channels; ++c) pixels[i * channels + c] = 0.0f;
    }
  }

  result.frame = std::move(fused.image);
  result.hole_mask = std::move(fused.hole_mask);
  result.candidates = {std::move(splat0.image), std::move(splat1.image)};
  result.coverage = {std::move(splat0.coverage), std::move(splat1.coverage)};
  result.masks = {std::move(masks.forward), std::move(masks.backward)};
  return result;
}

}  // namespace

OcclusionMasks derive_occlusion_masks(const ScalarMap& cov0, const ScalarMap& cov1, MaskMode mode, double eps) {
  require_same_extent(cov0.extent(), "coverage 0", cov1.extent(), "coverage 1");
  if (mode == MaskMode::independent) return {coverage_to_mask(cov0, eps), coverage_to_mask(cov1, eps)};

  OcclusionMasks masks{ScalarMap(cov0.width(), cov0.height()), ScalarMap(cov0.width(), cov0.height())};
  const auto c0 = cov0.data();
  const auto c1 = cov1.data();
  auto o0 = masks.forward.data();
  auto o1 = masks.backward.data();
  for (std::size_t i = 0; i < c0.size(); ++i) {
    const double sum = static_cast<double>(c0[i]) + c1[i];
    o0[i] = sum >= eps ? static_cast<float>(c0[i] / sum) : 0.5f;
    o1[i] = 1.0f - o0[i];
  }
  return masks;
}

FusionResult fuse(const ImageBuffer& i0t, const ImageBuffer& i1t, const ScalarMap& o0, const ScalarMap& o1, double t,
                  double eps) {
  require_unit_time(t);
  require_same_extent(i0t.extent(), "candidate 0", i1t.extent(), "candidate 1");
  require_same_extent(i0t.extent(), "candidate 0", o0.extent(), "mask 0");
  require_same_extent(i0t.extent(), "candidate 0", o1.extent(), "mask 1");
  if (i0t.channels() != i1t.channels()) throw SizeError("candidate channel counts differ");

  const int channels = i0t.channels();
  FusionResult out{ImageBuffer(i0t.width(), i0t.height(), channels), ScalarMap(i0t.width(), i0t.height())};
  const auto m0 = o0.data();
  const auto m1 = o1.data();
  const auto a = i0t.data();
  const auto b = i1t.data();
  auto dst = out.image.data();
  auto holes = out.hole_mask.data();
  for (std::size_t i = 0; i < m0.size(); ++i) {
    const double w0 = (1.0 - t) * m0[i];
    const double w1 = t * m1[i];
    const double denominator = w0 + w1;
    if (denominator < eps) {
      holes[i] = 1.0f;
      continue;
    }
    for (int c = 0; c < channels; ++c) {
      const std::size_t k = i * channels + c;
      dst[k] = static_cast<float>((w0 * a[k] + w1 * b[k]) / denominator);
    }
  }
  return out;
}

ReconstructionResult reconstruct(const ImageBuffer& rs0, const ImageBuffer& rs1, const FlowField& f01,
                                 const FlowField& f10, double t, const ShutterSpec& spec,
                                 const ReconstructionConfig& cfg, const std::optional<BmfResiduals>& residuals) {
  check_pipeline_inputs(rs0, rs1, f01, f10, spec);
  require_unit_time(t);
  return reconstruct_with(rs0, rs1, f01, f10, t, spec, cfg, importance_maps(rs0, rs1, f01, f10, cfg.splat),
                          residuals);
}

std::vector<ReconstructionResult> reconstruct_sequence(const ImageBuffer& rs0, const ImageBuffer& rs1,
                                                       const FlowField& f01, const FlowField& f10,
                                                       const std::vector<double>& times, const ShutterSpec& spec,
                                                       const ReconstructionConfig& cfg) {
  check_pipeline_inputs(rs0, rs1, f01, f10, spec);
  for (double t : times) require_unit_time(t);
  // The importance maps do not depend on t.
  const Importance importance = importance_maps(rs0, rs1, f01, f10, cfg.splat);
  std::vector<ReconstructionResult> results;
  results.reserve(times.size());
  for (double t : times) results.push_back(reconstruct_with(rs0, rs1, f01, f10, t, spec, cfg, importance, std::nullopt));
  return results;
}

double hole_fraction(const ScalarMap& hole_mask) {
  if (hole_mask.empty()) return 0.0;
  std::size_t count = 0;
  for (float v : hole_mask.data()) count += v >= 0.5f ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(hole_mask.data().size());
}

}  // namespace rsvr
