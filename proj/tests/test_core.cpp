#include <doctest.h>

#include "rsvr/core.hpp"
#include "support.hpp"

using namespace rsvr;

TEST_SUITE("core") {
  TEST_CASE("bilinear sample is exact at grid points") {
    const ImageBuffer img = test::random_image(8, 8, 3, 1);
    const Pixel p = bilinear_sample(img, 3, 5);
    for (int c = 0; c < 3; ++c) CHECK(p[c] == img.at(3, 5, c));
  }

  TEST_CASE("bilinear sample of a constant image is constant") {
    const ImageBuffer img(6, 4, 1, 0.7f);
    for (double x : {-3.0, 0.0, 1.3, 4.99, 12.0}) {
      for (double y : {-1.0, 0.5, 2.25, 7.0}) CHECK(bilinear_sample(img, x, y)[0] == doctest::Approx(0.7f));
    }
  }

  TEST_CASE("bilinear sample interpolates between two pixels") {
    const ImageBuffer img(2, 1, 1, std::vector<float>{0.0f, 1.0f});
    CHECK(bilinear_sample(img, 0.25, 0.0)[0] == doctest::Approx(0.25).epsilon(1e-7));
  }

  TEST_CASE("bilinear sample is linear along each axis") {
    const ImageBuffer img = test::random_image(5, 5, 1, 2);
    for (double f : {0.1, 0.5, 0.9}) {
      const double expected_x = (1 - f) * img.at(1, 2) + f * img.at(2, 2);
      const double expected_y = (1 - f) * img.at(3, 1) + f * img.at(3, 2);
      CHECK(bilinear_sample(img, 1 + f, 2)[0] == doctest::Approx(expected_x).epsilon(1e-6));
      CHECK(bilinear_sample(img, 3, 1 + f)[0] == doctest::Approx(expected_y).epsilon(1e-6));
    }
  }

  TEST_CASE("out-of-bounds sampling clamps to the border") {
    const ImageBuffer img = test::random_image(4, 3, 1, 3);
    CHECK(bilinear_sample(img, -5.0, -5.0)[0] == img.at(0, 0));
    CHECK(bilinear_sample(img, 10.0, 1.0)[0] == img.at(3, 1));
    CHECK(bilinear_sample(img, 2.0, 9.0)[0] == img.at(2, 2));
  }

  TEST_CASE("constructors reject mismatched lengths and bad values") {
    CHECK_THROWS_AS(ImageBuffer(2, 2, 1, std::vector<float>(3)), SizeError);
    CHECK_THROWS_AS(ImageBuffer(2, 2, 2), SizeError);
    CHECK_THROWS_AS(ScalarMap(2, 2, std::vector<float>(5)), SizeError);
    CHECK_THROWS_AS(FlowField(1, 1, std::vector<FlowVector>{{NAN, 0.0f}}), RangeError);
    CHECK_THROWS_AS(ImageBuffer(1, 1, 1, std::vector<float>{1.5f}), RangeError);
  }

  TEST_CASE("shutter spec validation") {
    CHECK_NOTHROW(ShutterSpec(256, 1.0));
    CHECK_NOTHROW(ShutterSpec(2, 0.01));
    CHECK_THROWS_AS(ShutterSpec(1, 1.0), RangeError);
    CHECK_THROWS_AS(ShutterSpec(256, 0.0), RangeError);
    CHECK_THROWS_AS(ShutterSpec(256, 1.5), RangeError);
  }

  TEST_CASE("dimension mismatch names both operands") {
    try {
      require_same_extent({4, 4}, "rs0", {4, 5}, "flow01");
      FAIL("expected SizeError");
    } catch (const SizeError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("rs0") != std::string::npos);
      CHECK(msg.find("flow01") != std::string::npos);
    }
  }

  TEST_CASE("flow components") {
    const FlowField f = test::random_flow(5, 4, 3.0f, 4);
    const ScalarMap v = vertical_component(f);
    const ScalarMap u = horizontal_component(f);
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 5; ++x) {
        CHECK(v.at(x, y) == f.at(x, y).v);
        CHECK(u.at(x, y) == f.at(x, y).u);
      }
    }
  }
}
