#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>

#include "frxa/face_regions.hpp"
#include "frxa/image.hpp"
#include "frxa/tensor.hpp"

namespace frxa {

inline constexpr std::size_t kResizeSide = 72;
inline constexpr std::size_t kInputSide = 64;
inline constexpr std::size_t kCropSlack = kResizeSide - kInputSide;

using Rng = std::mt19937_64;

/// Dataset pixel statistics on the [0, 1] scale.
struct Normalization {
  double mean = 0.0;
  double std = 1.0;
};

/// Mean and standard deviation over every pixel of every image, pixels scaled to [0, 1].
Normalization compute_normalization(std::span<const GrayImage> images);

/// Region crop of a face, optionally padded to a square. Without landmarks only whole_face is
/// available and means the full image.
GrayImage region_input(const GrayImage& image, const std::optional<LandmarkSet68>& landmarks, Region region,
                       bool padding, double margin = kDefaultRegionMargin);

/// Resolved randomness for one training view.
struct AugmentChoice {
  std::size_t square_offset = 0;  // along the long axis, only for non-square inputs
  std::size_t crop_x = kCropSlack / 2;
  std::size_t crop_y = kCropSlack / 2;
  bool flip = false;
};

AugmentChoice draw_augment(const GrayImage& image, Rng& rng);
/// Square crop (non-square inputs only) -> resize 72x72 -> 64x64 crop -> optional flip.
GrayImage augment_view(const GrayImage& image, const AugmentChoice& choice);
/// Writes (pixel/255 - mean)/std into `out` (64*64 values).
void normalize_into(const GrayImage& view, const Normalization& norm, std::span<float> out);

/// Unnormalized view seen at evaluation: centered square crop, resize, center 64x64 crop.
GrayImage eval_view(const GrayImage& image);

Tensor<float> augment_train(const GrayImage& image, const Normalization& norm, Rng& rng);
/// Centered square crop for non-square inputs, resize, center 64x64 crop; deterministic.
Tensor<float> augment_eval(const GrayImage& image, const Normalization& norm);

}  // namespace frxa
