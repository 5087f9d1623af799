#include <cmath>

#include <gtest/gtest.h>

#include "frxa/augment.hpp"

using namespace frxa;

namespace {

GrayImage gradient(std::size_t w, std::size_t h) {
  GrayImage img(w, h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) img.at(x, y) = static_cast<std::uint8_t>((3 * x + 5 * y) % 256);
  return img;
}

}  // namespace

TEST(Normalization, MeanAndStdOnUnitScale) {
  const std::vector<GrayImage> imgs{GrayImage(2, 2, 0), GrayImage(2, 2, 255)};
  const auto n = compute_normalization(imgs);
  EXPECT_NEAR(n.mean, 0.5, 1e-12);
  EXPECT_NEAR(n.std, 0.5, 1e-12);
}

TEST(Normalization, ConstantImagesKeepUnitStd) {
  const std::vector<GrayImage> imgs{GrayImage(3, 3, 51)};
  const auto n = compute_normalization(imgs);
  EXPECT_NEAR(n.mean, 0.2, 1e-12);
  EXPECT_EQ(n.std, 1.0);
  const auto t = augment_eval(imgs[0], n);
  for (float v : t.data()) EXPECT_NEAR(v, 0.0f, 1e-6f);
}

TEST(Augment, CenteredChoiceEqualsEvalView) {
  const auto img = gradient(50, 30);
  AugmentChoice c;
  c.square_offset = 10;
  EXPECT_EQ(augment_view(img, c), eval_view(img));
  EXPECT_EQ(eval_view(img).width, kInputSide);
  EXPECT_EQ(eval_view(img).height, kInputSide);
}

TEST(Augment, FlipIsAnInvolution) {
  const auto img = gradient(64, 64);
  EXPECT_EQ(flip_horizontal(flip_horizontal(img)), img);
  EXPECT_EQ(flip_horizontal(img).at(0, 5), img.at(63, 5));
}

TEST(Augment, CropOffsetShiftsTheResizedImage) {
  const auto img = gradient(72, 72);  // resize to 72 is the identity
  AugmentChoice c;
  c.crop_x = 0;
  c.crop_y = 8;
  const auto v = augment_view(img, c);
  EXPECT_EQ(v.at(0, 0), img.at(0, 8));
  EXPECT_EQ(v.at(63, 55), img.at(63, 63));
  EXPECT_EQ(eval_view(img).at(0, 0), img.at(4, 4));
}

TEST(Augment, DrawsStayInsideTheirRanges) {
  Rng rng(3);
  const auto img = gradient(40, 25);
  bool flipped = false, unflipped = false;
  for (int i = 0; i < 500; ++i) {
    const auto c = draw_augment(img, rng);
    EXPECT_LE(c.square_offset, 15u);
    EXPECT_LE(c.crop_x, kCropSlack);
    EXPECT_LE(c.crop_y, kCropSlack);
    (c.flip ? flipped : unflipped) = true;
  }
  EXPECT_TRUE(flipped && unflipped);
}

TEST(Augment, SquareInputHasNoSquareOffset) {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(draw_augment(GrayImage(30, 30), rng).square_offset, 0u);
}

TEST(Augment, TrainViewsAreSeedDeterministic) {
  const auto img = gradient(48, 60);
  Rng a(9), b(9);
  EXPECT_EQ(augment_train(img, {}, a), augment_train(img, {}, b));
}

TEST(RegionInput, PaddingKeepsAspectAndWithoutLandmarksOnlyWholeFace) {
  const auto img = gradient(40, 20);
  EXPECT_EQ(region_input(img, std::nullopt, Region::whole_face, false), img);
  const auto padded = region_input(img, std::nullopt, Region::whole_face, true);
  EXPECT_EQ(padded.width, 40u);
  EXPECT_EQ(padded.height, 40u);
  EXPECT_THROW(region_input(img, std::nullopt, Region::mouth, true), std::invalid_argument);
}

TEST(Resize, ConstantImageStaysConstant) {
  const auto r = resize_bilinear(GrayImage(13, 7, 77), 72, 72);
  for (auto px : r.pixels) EXPECT_EQ(px, 77);
}
