#include "frxa/augment.hpp"

#include <cmath>

#include <fmt/format.h>

namespace frxa {

Normalization compute_normalization(std::span<const GrayImage> images) {
  double sum = 0;
  double sq = 0;
  std::size_t count = 0;
  for (const auto& img : images) {
    for (std::uint8_t px : img.pixels) {
      const double v = px / 255.0;
      sum += v;
      sq += v * v;
    }
    count += img.pixels.size();
  }
  if (count == 0) throw std::invalid_argument("compute_normalization: no pixels");
  const double mean = sum / static_cast<double>(count);
  const double var = std::max(0.0, sq / static_cast<double>(count) - mean * mean);
  const double std = std::sqrt(var);
  return {mean, std > 1e-8 ? std : 1.0};
}

GrayImage region_input(const GrayImage& image, const std::optional<LandmarkSet68>& landmarks, Region region,
                       bool padding, double margin) {
  GrayImage cropped;
  if (landmarks) {
    cropped = extract_region(image, *landmarks, region, margin).pixels;
  } else if (region == Region::whole_face) {
    cropped = image;
  } else {
    throw std::invalid_argument(fmt::format("region '{}' needs landmarks", region_name(region)));
  }
  return padding ? pad_to_square(cropped) : cropped;
}

AugmentChoice draw_augment(const GrayImage& image, Rng& rng) {
  AugmentChoice choice;
  const std::size_t slack = std::max(image.width, image.height) - std::min(image.width, image.height);
  if (slack > 0) choice.square_offset = std::uniform_int_distribution<std::size_t>(0, slack)(rng);
  std::uniform_int_distribution<std::size_t> offset(0, kCropSlack);
  choice.crop_x = offset(rng);
  choice.crop_y = offset(rng);
  choice.flip = std::bernoulli_distribution(0.5)(rng);
  return choice;
}

GrayImage augment_view(const GrayImage& image, const AugmentChoice& choice) {
  if (image.empty()) throw std::invalid_argument("augment: empty image");
  GrayImage square;
  if (image.width > image.height) {
    square = crop(image, choice.square_offset, 0, image.height, image.height);
  } else if (image.height > image.width) {
    square = crop(image, 0, choice.square_offset, image.width, image.width);
  } else {
    square = image;
  }
  GrayImage view = crop(resize_bilinear(square, kResizeSide, kResizeSide), choice.crop_x, choice.crop_y, kInputSide,
                        kInputSide);
  return choice.flip ? flip_horizontal(view) : view;
}

void normalize_into(const GrayImage& view, const Normalization& norm, std::span<float> out) {
  if (out.size() != view.pixels.size()) throw std::invalid_argument("normalize_into: size mismatch");
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>((view.pixels[i] / 255.0 - norm.mean) / norm.std);
  }
}

Tensor<float> augment_train(const GrayImage& image, const Normalization& norm, Rng& rng) {
  Tensor<float> out({1, 1, kInputSide, kInputSide});
  normalize_into(augment_view(image, draw_augment(image, rng)), norm, out.data());
  return out;
}

GrayImage eval_view(const GrayImage& image) {
  AugmentChoice centered;
  const std::size_t slack = std::max(image.width, image.height) - std::min(image.width, image.height);
  centered.square_offset = slack / 2;
  return augment_view(image, centered);
}

Tensor<float> augment_eval(const GrayImage& image, const Normalization& norm) {
  Tensor<float> out({1, 1, kInputSide, kInputSide});
  normalize_into(eval_view(image), norm, out.data());
  return out;
}

}  // namespace frxa
