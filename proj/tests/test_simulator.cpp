#include <doctest.h>

#include "rsvr/io.hpp"
#include "rsvr/shutter.hpp"
#include "rsvr/simulator.hpp"
#include "rsvr/warp.hpp"
#include "support.hpp"

using namespace rsvr;

namespace {

SceneSpec bar_scene(double vx) {
  // Checker cells 4 px wide; their vertical edges act as bars.
  SceneSpec scene;
  scene.width = 256;
  scene.height = 256;
  scene.supersample = 4;
  scene.texture.kind = TextureKind::checkerboard;
  scene.texture.period = 4.0;
  scene.texture.contrast = 0.5;
  scene.motion.background = {vx, 0.0};
  return scene;
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("scene validation") {
    SceneSpec s = test::pan_scene(10, 0, 64);
    CHECK_NOTHROW(validate(s, ShutterSpec(64, 1.0)));
    CHECK_THROWS_AS(validate(s, ShutterSpec(32, 1.0)), SizeError);
    s.supersample = 5;
    CHECK_THROWS_AS(validate(s), RangeError);
    s = test::pan_scene(10, 40, 64);
    CHECK_THROWS_AS(validate(s), RangeError);
    s = test::pan_scene(0, 0, 4);
    CHECK_THROWS_AS(validate(s), RangeError);
  }

  TEST_CASE("lattice values are reproducible and bounded") {
    for (std::int64_t i = -5; i < 5; ++i) {
      const double v = lattice_value(42, i, 3 * i);
      CHECK(v >= 0.0);
      CHECK(v < 1.0);
      CHECK(v == lattice_value(42, i, 3 * i));
    }
    CHECK(lattice_value(1, 0, 0) != lattice_value(2, 0, 0));
  }

  TEST_CASE("zero velocity scenes are static") {
    const SceneSpec s = test::pan_scene(0, 0, 64);
    const ImageBuffer g = render_gs(s, 0.0);
    CHECK(render_gs(s, 0.37) == g);
    CHECK(render_rs(s, ShutterSpec(64, 1.0), Frame::first) == g);
    CHECK(render_rs(s, ShutterSpec(64, 0.5), Frame::second) == g);
    const FlowField still = gt_flow(s, ShutterSpec(64, 1.0), Frame::first);
    for (const FlowVector& f : still.data()) CHECK(f == FlowVector{0, 0});
  }

  TEST_CASE("gs frames translate with the background") {
    SceneSpec s = test::pan_scene(40, 0, 128);
    s.supersample = 4;
    const ImageBuffer g0 = render_gs(s, 0.0);
    const ImageBuffer g5 = render_gs(s, 0.5);
    const ImageBuffer shifted = backward_warp(g0, test::constant_flow(128, 128, -20, 0));
    double worst = 0.0;
    for (int y = 0; y < 128; ++y) {
      for (int x = 24; x < 128; ++x) worst = std::max(worst, std::abs(static_cast<double>(g5.at(x, y)) - shifted.at(x, y)));
    }
    CHECK(worst < 2.0 / 255.0);
  }

  TEST_CASE("rs rows equal gs rows at their exposure time") {
    SceneSpec s = test::pan_scene(25, 6, 64);
    s.motion.sprite = Sprite{{10, 12, 20, 16}, {-8, 3}, test::checker_texture(4.0, 0.4)};
    for (double gamma : {1.0, 0.6}) {
      const ShutterSpec spec(64, gamma);
      for (Frame f : {Frame::first, Frame::second}) {
        const ImageBuffer rs = render_rs(s, spec, f);
        for (int y = 0; y < 64; ++y) {
          const ImageBuffer gs = render_gs(s, scanline_to_time(spec, f, y));
          CHECK(std::equal(rs.row(y).begin(), rs.row(y).end(), gs.row(y).begin()));
        }
      }
    }
  }

  TEST_CASE("central rs row equals the gs frame at the frame time") {
    const SceneSpec s = test::pan_scene(33, 0, 64);
    const ShutterSpec spec(64, 1.0);
    const ImageBuffer rs = render_rs(s, spec, Frame::first);
    const ImageBuffer gs = render_gs(s, 0.0);
    CHECK(std::equal(rs.row(32).begin(), rs.row(32).end(), gs.row(32).begin()));
  }

  TEST_CASE("vertical structures slant under horizontal motion") {
    const double vx = 51.2;
    const SceneSpec s = bar_scene(vx);
    const ShutterSpec spec(256, 1.0);
    const ImageBuffer rs = render_rs(s, spec, Frame::first);
    // Subpixel position of the first dark-to-bright edge along a row.
    const auto edge = [&](int y) {
      for (int x = 1; x < 256; ++x) {
        const float a = rs.at(x - 1, y);
        const float b = rs.at(x, y);
        if (a < 0.5f && b >= 0.5f) return x - 1 + (0.5 - a) / (b - a);
      }
      return -1.0;
    };
    const double e0 = edge(101);
    const double e1 = edge(111);
    REQUIRE(e0 >= 0.0);
    REQUIRE(e1 >= 0.0);
    double slant = e1 - e0;
    while (slant > 4.0) slant -= 8.0;
    while (slant < -4.0) slant += 8.0;
    CHECK(slant == doctest::Approx(10 * vx / 256).epsilon(0.05));
  }

  TEST_CASE("horizontal pan flow is constant") {
    const SceneSpec s = test::pan_scene(40, 0, 64);
    const ShutterSpec spec(64, 1.0);
    const FlowField f01 = gt_flow(s, spec, Frame::first);
    const FlowField f10 = gt_flow(s, spec, Frame::second);
    for (const FlowVector& f : f01.data()) CHECK(f == FlowVector{40, 0});
    for (const FlowVector& f : f10.data()) CHECK(f == FlowVector{-40, 0});
  }

  TEST_CASE("fixed point solver agrees with the closed form") {
    for (double gamma : {1.0, 0.7}) {
      const ShutterSpec spec(256, gamma);
      for (double vy : {-60.0, -8.0, 0.0, 8.0, 100.0}) {
        for (double y0 : {0.0, 50.5, 128.0, 255.0}) {
          for (auto [src, dst] : {std::pair{Frame::first, Frame::second}, std::pair{Frame::second, Frame::first}}) {
            const double closed = landing_row_closed_form(spec, src, dst, y0, vy);
            CHECK(std::abs(landing_row_fixed_point(spec, src, dst, y0, vy) - closed) <= 1e-4);
          }
        }
      }
    }
    // y1 = 128 + 8 (1 + (y1 - 128)/256)  =>  y1 = 128 + 8 * 256/248.
    const double y1 = landing_row_closed_form(ShutterSpec(256, 1.0), Frame::first, Frame::second, 128.0, 8.0);
    CHECK(y1 == doctest::Approx(128.0 + 2048.0 / 248.0).epsilon(1e-12));
  }

  TEST_CASE("gt flow is photometrically consistent") {
    struct Residual {
      double mean = 0.0;
      double worst = 0.0;
    };
    for (const bool smooth : {true, false}) {
      for (auto [vx, vy] : {std::pair{40.0, 0.0}, std::pair{0.0, 8.0}, std::pair{-17.0, -11.0}}) {
        CAPTURE(smooth);
        CAPTURE(vx);
        CAPTURE(vy);
        SceneSpec s = test::pan_scene(vx, vy, 128);
        if (smooth) s.texture = test::noise_texture(7, 16.0);
        s.supersample = 4;
        const ShutterSpec spec(128, 1.0);
        const ImageBuffer rs0 = render_rs(s, spec, Frame::first);
        const ImageBuffer rs1 = render_rs(s, spec, Frame::second);
        const FlowField f01 = gt_flow(s, spec, Frame::first);
        // Residual over pixels whose partner lies well inside frame 1.
        const auto residual = [&](float du, float dv) {
          FlowField f = f01;
          for (FlowVector& v : f.data()) v = {v.u + du, v.v + dv};
          const ImageBuffer warped = backward_warp(rs1, f);
          Residual r;
          int count = 0;
          for (int y = 0; y < 128; ++y) {
            for (int x = 0; x < 128; ++x) {
              const double lx = x + f01.at(x, y).u;
              const double ly = y + f01.at(x, y).v;
              if (lx < 3 || ly < 3 || lx > 124 || ly > 124) continue;
              const double e = std::abs(static_cast<double>(warped.at(x, y)) - rs0.at(x, y));
              r.mean += e;
              r.worst = std::max(r.worst, e);
              ++count;
            }
          }
          r.mean /= count;
          return r;
        };
        const Residual exact = residual(0, 0);
        if (smooth) {
          CHECK(exact.worst <= 4.0 / 255.0);
        } else {
          // Bilinear resampling of hard checker edges at subpixel offsets is not
          // exact, so only the mean is bounded and the flow must beat its neighbours.
          CHECK(exact.mean <= 2.0 / 255.0);
        }
        for (auto [du, dv] :
             {std::pair{0.5f, 0.0f}, std::pair{-0.5f, 0.0f}, std::pair{0.0f, 0.5f}, std::pair{0.0f, -0.5f}}) {
          CHECK(residual(du, dv).mean > exact.mean);
        }
      }
    }
  }

  TEST_CASE("sprite pixels carry sprite flow") {
    SceneSpec s = test::pan_scene(10, 0, 64);
    s.motion.sprite = Sprite{{20, 20, 16, 16}, {-6, 0}, test::checker_texture(4.0, 0.4)};
    const ShutterSpec spec(64, 1.0);
    const FlowField f = gt_flow(s, spec, Frame::first);
    CHECK(f.at(2, 2) == FlowVector{10, 0});
    CHECK(f.at(28, 28).u == doctest::Approx(-6.0f));
  }

  TEST_CASE("dataset emission") {
    test::TempDir dir;
    const SceneSpec s = test::pan_scene(20, 3, 32);
    const ShutterSpec spec(32, 1.0);
    const Manifest m = emit_dataset(s, spec, {0.0, 0.5, 1.0}, dir.path() / "a");
    CHECK(m.files.size() == 7);
    for (const char* name : {"rs0.png", "rs1.png", "flow_01.flo", "flow_10.flo", "gt_0.png", "gt_0.5.png",
                             "gt_1.png", "manifest.json"}) {
      CHECK(std::filesystem::exists(dir.path() / "a" / name));
    }
    const Manifest back = read_manifest(dir.path() / "a" / "manifest.json");
    CHECK(back == m);
    CHECK(back.scene == s);
    CHECK(back.shutter == spec);
    const Manifest again = emit_dataset(s, spec, {0.0, 0.5, 1.0}, dir.path() / "b");
    for (std::size_t i = 0; i < m.files.size(); ++i) CHECK(m.files[i].sha256 == again.files[i].sha256);
    CHECK(read_image(dir.path() / "a" / "gt_0.5.png") == read_image(dir.path() / "b" / "gt_0.5.png"));
  }

  TEST_CASE("time formatting") {
    CHECK(format_time(0.0) == "0");
    CHECK(format_time(1.0) == "1");
    CHECK(format_time(0.25) == "0.25");
    CHECK(gt_file_name(0.5) == "gt_0.5.png");
  }

  TEST_CASE("render is identical for any thread count") {
    SceneSpec s = test::pan_scene(13, 5, 64);
    s.motion.sprite = Sprite{{10, 12, 20, 16}, {-8, 3}, test::noise_texture(9, 4.0)};
    const ShutterSpec spec(64, 0.8);
    const int saved = num_threads();
    set_num_threads(1);
    const ImageBuffer one = render_rs(s, spec, Frame::second);
    const FlowField flow = gt_flow(s, spec, Frame::second);
    set_num_threads(4);
    CHECK(render_rs(s, spec, Frame::second) == one);
    CHECK(gt_flow(s, spec, Frame::second) == flow);
    set_num_threads(saved);
  }
}
