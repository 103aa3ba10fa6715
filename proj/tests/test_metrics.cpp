#include <doctest.h>

#include "rsvr/metrics.hpp"
#include "support.hpp"

using namespace rsvr;

namespace {

ImageBuffer offset(const ImageBuffer& img, float d) {
  ImageBuffer out = img;
  for (float& v : out.data()) v += d;
  return out;
}

ImageBuffer checker(int size, int cell) {
  ImageBuffer img(size, size, 1);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) img.at(x, y) = ((x / cell + y / cell) % 2) ? 0.75f : 0.25f;
  }
  return img;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("l1 loss") {
    const ImageBuffer gt = ImageBuffer(16, 16, 3, 0.5f);
    CHECK(l1_loss(gt, gt) == 0.0);
    CHECK(l1_loss(offset(gt, 0.1f), gt) == doctest::Approx(0.1).epsilon(1e-6));

    ImageBuffer pred = gt;
    ScalarMap mask(16, 16, 1.0f);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 16; ++x) {
        for (int c = 0; c < 3; ++c) pred.at(x, y, c) += 0.2f;
        mask.at(x, y) = 0.0f;
      }
    }
    CHECK(l1_loss(pred, gt, mask) == 0.0);
    CHECK_THROWS_AS(l1_loss(pred, gt, ScalarMap(16, 16, 0.0f)), EvaluationError);
    CHECK_THROWS_AS(l1_loss(pred, ImageBuffer(16, 16, 1)), SizeError);
  }

  TEST_CASE("psnr") {
    const ImageBuffer gt = test::random_image(32, 32, 1, 1);
    CHECK(psnr(gt, gt) == kPsnrCapDb);
    CHECK(psnr_from_mse(0.01) == doctest::Approx(20.0));
    CHECK(psnr_from_mse(0.000631) == doctest::Approx(32.0).epsilon(1e-3));
    CHECK(psnr(ImageBuffer(4, 4, 1, 0.1f), ImageBuffer(4, 4, 1, 0.2f)) == doctest::Approx(20.0).epsilon(1e-5));
  }

  TEST_CASE("psnr decreases with noise amplitude") {
    const ImageBuffer gt(32, 32, 1, 0.5f);
    const ImageBuffer noise = test::random_image(32, 32, 1, 2);
    double previous = kPsnrCapDb + 1;
    for (float amp : {0.01f, 0.05f, 0.2f}) {
      ImageBuffer pred = gt;
      for (std::size_t i = 0; i < pred.data().size(); ++i) pred.data()[i] += amp * (noise.data()[i] - 0.5f);
      const double p = psnr(pred, gt);
      CHECK(p < previous);
      previous = p;
    }
  }

  TEST_CASE("metrics are symmetric") {
    const ImageBuffer a = test::random_image(24, 20, 3, 3);
    const ImageBuffer b = test::random_image(24, 20, 3, 4);
    CHECK(psnr(a, b) == psnr(b, a));
    CHECK(l1_loss(a, b) == l1_loss(b, a));
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-6));
  }

  TEST_CASE("ssim") {
    const ImageBuffer img = checker(32, 4);
    CHECK(ssim(img, img) == doctest::Approx(1.0));
    CHECK(ssim(ImageBuffer(16, 16, 1, 0.3f), ImageBuffer(16, 16, 1, 0.3f)) == doctest::Approx(1.0));
    ImageBuffer inverted = img;
    for (float& v : inverted.data()) v = 1.0f - v;
    CHECK(ssim(inverted, img) < 0.5);
    const double s = ssim(test::random_image(20, 20, 1, 5), test::random_image(20, 20, 1, 6));
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
    CHECK_THROWS_AS(ssim(ImageBuffer(10, 30, 1), ImageBuffer(10, 30, 1)), EvaluationError);
  }

  TEST_CASE("contextual consistency") {
    const ImageBuffer gt = test::random_image(16, 16, 1, 7);
    CHECK(contextual_consistency(gt, gt, gt) == 0.0);
    const ImageBuffer base(16, 16, 1, 0.3f);
    CHECK(contextual_consistency(base, offset(base, 0.2f), base) == doctest::Approx(0.1).epsilon(1e-6));
    const ImageBuffer a = test::random_image(16, 16, 1, 8);
    const ImageBuffer b = test::random_image(16, 16, 1, 9);
    CHECK(contextual_consistency(a, b, gt) == 0.5 * (l1_loss(a, gt) + l1_loss(b, gt)));
    CHECK(contextual_consistency(a, a, gt) == l1_loss(a, gt));
  }

  TEST_CASE("tv energy") {
    CHECK(tv_energy(test::constant_flow(8, 8, 3, -2)) == 0.0);
    FlowField ramp(10, 6);
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 10; ++x) ramp.at(x, y) = {static_cast<float>(x), 0.0f};
    }
    CHECK(tv_energy(ramp) == doctest::Approx(1.0));
    CHECK(tv_energy(test::random_flow(9, 9, 5.0f, 10)) >= 0.0);
    CHECK_THROWS_AS(tv_energy(FlowField(1, 5)), SizeError);
  }
}
