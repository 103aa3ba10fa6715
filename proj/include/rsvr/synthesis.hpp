#pragma once

#include <array>
#include <optional>
#include <vector>

#include "rsvr/bmf.hpp"
#include "rsvr/core.hpp"
#include "rsvr/warp.hpp"

namespace rsvr {

enum class MaskMode {
  complement,   // O1 = 1 - O0, O0 from relative coverage
  independent,  // each mask from its own coverage
};

struct ReconstructionConfig {
  BmfConfig bmf;
  SplatConfig splat;
  MaskMode mask_mode = MaskMode::complement;
  double fusion_epsilon = 1e-4;
};

struct OcclusionMasks {
  ScalarMap forward;   // O_{0->t}
  ScalarMap backward;  // O_{1->t}
};

struct FusionResult {
  ImageBuffer image;
  ScalarMap hole_mask;  // 1 where the fusion denominator fell below eps
};

/// Externally supplied motion residuals added to the two motion fields.
struct BmfResiduals {
  FlowField forward;
  FlowField backward;
};

struct ReconstructionResult {
  double t = 0.0;
  ImageBuffer frame;
  ScalarMap hole_mask;                 // 1 = unrecoverable
  std::array<ImageBuffer, 2> candidates;
  std::array<ScalarMap, 2> masks;      // O_{0->t}, O_{1->t}
  std::array<FlowField, 2> bmf;        // motion fields actually splatted
  std::array<ScalarMap, 2> coverage;
};

/// Complement: O0 = cov0 / (cov0 + cov1) where the sum reaches eps, else 0.5;
/// O1 = 1 - O0. Independent: O_i = coverage_to_mask(cov_i, eps).
OcclusionMasks derive_occlusion_masks(const ScalarMap& cov0, const ScalarMap& cov1, MaskMode mode,
                                      double eps = 1e-4);

/// Time-weighted fusion
///   I = [(1-t) O0 I0 + t O1 I1] / [(1-t) O0 + t O1]
/// with output 0 and hole flag 1 where the denominator is below eps.
FusionResult fuse(const ImageBuffer& i0t, const ImageBuffer& i1t, const ScalarMap& o0, const ScalarMap& o1, double t,
                  double eps = 1e-4);

/// Full pipeline: correction maps -> motion fields (+ residuals) -> forward
/// splatting of both RS frames -> occlusion masks -> fusion. A pixel is also
/// a hole when neither RS frame reaches it.
ReconstructionResult reconstruct(const ImageBuffer& rs0, const ImageBuffer& rs1, const FlowField& f01,
                                 const FlowField& f10, double t, const ShutterSpec& spec,
                                 const ReconstructionConfig& cfg,
                                 const std::optional<BmfResiduals>& residuals = std::nullopt);

/// One reconstruction per requested time, each identical to reconstruct().
std::vector<ReconstructionResult> reconstruct_sequence(const ImageBuffer& rs0, const ImageBuffer& rs1,
                                                       const FlowField& f01, const FlowField& f10,
                                                       const std::vector<double>& times, const ShutterSpec& spec,
                                                       const ReconstructionConfig& cfg);

/// Fraction of pixels flagged in a {0,1} mask.
double hole_fraction(const ScalarMap& hole_mask);

}  // namespace rsvr
