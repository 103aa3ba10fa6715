#include <doctest.h>

#include "rsvr/metrics.hpp"
#include "rsvr/synthesis.hpp"
#include "support.hpp"

using namespace rsvr;

namespace {

ScalarMap filled(float v) { return ScalarMap(3, 2, v); }
ImageBuffer image(float v) { return ImageBuffer(3, 2, 1, v); }

}  // namespace

TEST_SUITE("synthesis") {
  TEST_CASE("complement masks") {
    OcclusionMasks m = derive_occlusion_masks(filled(1.0f), filled(0.0f), MaskMode::complement);
    CHECK(m.forward.at(0, 0) == 1.0f);
    CHECK(m.backward.at(0, 0) == 0.0f);
    m = derive_occlusion_masks(filled(1.0f), filled(1.0f), MaskMode::complement);
    CHECK(m.forward.at(1, 1) == 0.5f);
    CHECK(m.backward.at(1, 1) == 0.5f);
    m = derive_occlusion_masks(filled(0.6f), filled(0.2f), MaskMode::complement);
    CHECK(m.forward.at(2, 1) == doctest::Approx(0.75f).epsilon(1e-6));
    CHECK(m.backward.at(2, 1) == doctest::Approx(0.25f).epsilon(1e-6));
  }

  TEST_CASE("complement masks sum to one exactly") {
    ScalarMap c0(50, 50);
    ScalarMap c1(50, 50);
    std::mt19937 rng(3);
    std::uniform_real_distribution<float> d(0.0f, 3.0f);
    for (std::size_t i = 0; i < c0.data().size(); ++i) {
      c0.data()[i] = i % 7 == 0 ? 0.0f : d(rng);
      c1.data()[i] = i % 5 == 0 ? 0.0f : d(rng);
    }
    const OcclusionMasks m = derive_occlusion_masks(c0, c1, MaskMode::complement);
    for (std::size_t i = 0; i < c0.data().size(); ++i) CHECK(m.forward.data()[i] + m.backward.data()[i] == 1.0f);
  }

  TEST_CASE("independent masks follow each coverage") {
    const OcclusionMasks m = derive_occlusion_masks(filled(0.5f), filled(2.0f), MaskMode::independent);
    CHECK(m.forward.at(0, 0) == 0.5f);
    CHECK(m.backward.at(0, 0) == 1.0f);
  }

  TEST_CASE("fusion trivial cases") {
    const ImageBuffer a = test::random_image(3, 2, 1, 1);
    const ImageBuffer b = test::random_image(3, 2, 1, 2);
    for (double t : {0.0, 0.3, 0.99}) {
      CHECK(test::max_abs_diff(fuse(a, b, filled(1.0f), filled(0.0f), t).image, a) <= 1e-6);
      CHECK(test::max_abs_diff(fuse(a, a, filled(1.0f), filled(1.0f), t).image, a) <= 1e-6);
    }
    const FusionResult r = fuse(image(0.8f), image(0.4f), filled(1.0f), filled(1.0f), 0.25);
    CHECK(r.image.at(0, 0) == doctest::Approx(0.7f).epsilon(1e-6));
    CHECK(r.hole_mask.at(0, 0) == 0.0f);
  }

  TEST_CASE("hole rule fires exactly below the fusion epsilon") {
    const double eps = 1e-4;
    // Denominator (1 - t) O0 + t O1 with t = 0.5 and O0 = O1 = m equals m.
    for (auto [m, hole] : {std::pair{5e-5f, true}, std::pair{9.99e-5f, true}, std::pair{1.0001e-4f, false},
                           std::pair{2e-4f, false}}) {
      const FusionResult r = fuse(image(0.6f), image(0.6f), filled(m), filled(m), 0.5, eps);
      CHECK(r.hole_mask.at(1, 0) == (hole ? 1.0f : 0.0f));
      CHECK(r.image.at(1, 0) == (hole ? 0.0f : doctest::Approx(0.6f).epsilon(1e-5)));
    }
    const FusionResult t0 = fuse(image(0.6f), image(0.2f), filled(0.0f), filled(1.0f), 0.0, eps);
    CHECK(t0.hole_mask.at(0, 0) == 1.0f);
  }

  TEST_CASE("fusion is convex outside holes") {
    const ImageBuffer a = test::random_image(20, 20, 3, 4);
    const ImageBuffer b = test::random_image(20, 20, 3, 5);
    ScalarMap o0(20, 20);
    ScalarMap o1(20, 20);
    std::mt19937 rng(6);
    std::uniform_real_distribution<float> d(0.0f, 1.0f);
    for (std::size_t i = 0; i < o0.data().size(); ++i) {
      o0.data()[i] = d(rng);
      o1.data()[i] = d(rng);
    }
    const FusionResult r = fuse(a, b, o0, o1, 0.4);
    for (int y = 0; y < 20; ++y) {
      for (int x = 0; x < 20; ++x) {
        if (r.hole_mask.at(x, y) != 0.0f) continue;
        for (int c = 0; c < 3; ++c) {
          CHECK(r.image.at(x, y, c) >= std::min(a.at(x, y, c), b.at(x, y, c)) - 1e-6f);
          CHECK(r.image.at(x, y, c) <= std::max(a.at(x, y, c), b.at(x, y, c)) + 1e-6f);
        }
      }
    }
  }

  TEST_CASE("identity reconstruction") {
    const ImageBuffer x = test::random_image(40, 32, 3, 7);
    const ShutterSpec spec(32, 1.0);
    for (double t : {0.0, 0.5, 1.0}) {
      const ReconstructionResult r = reconstruct(x, x, FlowField(40, 32), FlowField(40, 32), t, spec, {});
      CHECK(test::max_abs_diff(r.frame, x) <= 1e-6);
      CHECK(hole_fraction(r.hole_mask) == 0.0);
    }
  }

  TEST_CASE("input validation names the mismatched pair") {
    const ShutterSpec spec(16, 1.0);
    const ImageBuffer a(16, 16, 1);
    CHECK_THROWS_WITH_AS(reconstruct(a, a, FlowField(16, 16), FlowField(15, 16), 0.5, spec, {}),
                         doctest::Contains("flow10"), SizeError);
    CHECK_THROWS_WITH_AS(reconstruct(a, ImageBuffer(16, 15, 1), FlowField(16, 16), FlowField(16, 16), 0.5, spec, {}),
                         doctest::Contains("rs1"), SizeError);
    CHECK_THROWS_AS(reconstruct(a, ImageBuffer(16, 16, 3), FlowField(16, 16), FlowField(16, 16), 0.5, spec, {}),
                    SizeError);
    CHECK_THROWS_WITH_AS(reconstruct(a, a, FlowField(16, 16), FlowField(16, 16), 1.5, spec, {}),
                         doctest::Contains("t out of [0,1]"), RangeError);
  }

  TEST_CASE("residuals are added to the motion fields") {
    const ImageBuffer x = test::random_image(24, 24, 1, 8);
    const ShutterSpec spec(24, 1.0);
    const BmfResiduals res{test::constant_flow(24, 24, 1.0f, 0.0f), test::constant_flow(24, 24, 1.0f, 0.0f)};
    const ReconstructionResult r = reconstruct(x, x, FlowField(24, 24), FlowField(24, 24), 0.5, spec, {}, res);
    CHECK(r.bmf[0].at(3, 3) == FlowVector{1.0f, 0.0f});
    CHECK(r.frame.at(5, 5) == doctest::Approx(x.at(4, 5)).epsilon(1e-5));
    CHECK(r.hole_mask.at(0, 5) == 1.0f);
  }

  TEST_CASE("sequence matches single reconstructions") {
    const SceneSpec scene = test::pan_scene(12, 2, 48);
    const ShutterSpec spec(48, 1.0);
    const ImageBuffer rs0 = render_rs(scene, spec, Frame::first);
    const ImageBuffer rs1 = render_rs(scene, spec, Frame::second);
    const FlowField f01 = gt_flow(scene, spec, Frame::first);
    const FlowField f10 = gt_flow(scene, spec, Frame::second);
    const std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0};
    const auto seq = reconstruct_sequence(rs0, rs1, f01, f10, times, spec, {});
    REQUIRE(seq.size() == 5);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const ReconstructionResult one = reconstruct(rs0, rs1, f01, f10, times[i], spec, {});
      CHECK(seq[i].frame == one.frame);
      CHECK(seq[i].hole_mask == one.hole_mask);
      CHECK(seq[i].t == times[i]);
    }
  }

  TEST_CASE("end frames align with their adjacent RS frame") {
    const SceneSpec scene = test::pan_scene(30, 0, 96);
    const ShutterSpec spec(96, 1.0);
    const ImageBuffer rs0 = render_rs(scene, spec, Frame::first);
    const ImageBuffer rs1 = render_rs(scene, spec, Frame::second);
    const FlowField f01 = gt_flow(scene, spec, Frame::first);
    const FlowField f10 = gt_flow(scene, spec, Frame::second);
    const ReconstructionResult r0 = reconstruct(rs0, rs1, f01, f10, 0.0, spec, {});
    const ReconstructionResult r1 = reconstruct(rs0, rs1, f01, f10, 1.0, spec, {});
    CHECK(r0.frame != r1.frame);
    // Central rows of each RS frame are exposed at t = 0 and t = 1.
    ScalarMap central(96, 96);
    for (int y = 40; y < 56; ++y) {
      for (int x = 30; x < 66; ++x) central.at(x, y) = 1.0f;
    }
    CHECK(l1_loss(r0.frame, rs0, central) < l1_loss(r0.frame, rs1, central));
    CHECK(l1_loss(r1.frame, rs1, central) < l1_loss(r1.frame, rs0, central));
  }

  TEST_CASE("reconstruction output ranges") {
    const SceneSpec scene = test::pan_scene(20, 4, 64);
    const ShutterSpec spec(64, 1.0);
    const ReconstructionResult r =
        reconstruct(render_rs(scene, spec, Frame::first), render_rs(scene, spec, Frame::second),
                    gt_flow(scene, spec, Frame::first), gt_flow(scene, spec, Frame::second), 0.3, spec, {});
    for (float v : r.frame.data()) CHECK((v >= 0.0f && v <= 1.0f));
    for (float v : r.hole_mask.data()) CHECK((v == 0.0f || v == 1.0f));
    for (const ScalarMap& m : r.masks) {
      for (float v : m.data()) CHECK((v >= 0.0f && v <= 1.0f));
    }
  }
}
