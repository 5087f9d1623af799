#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "frxa/image.hpp"
#include "frxa/tensor.hpp"

namespace frxa {

/// Row-major 2-D map of reals.
struct Map2D {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  Map2D() = default;
  Map2D(std::size_t w, std::size_t h, double fill = 0.0) : width(w), height(h), values(w * h, fill) {}

  double& at(std::size_t x, std::size_t y) { return values[y * width + x]; }
  [[nodiscard]] double at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
};

struct CamMap {
  std::size_t class_index = 0;
  Map2D raw;
  Map2D normalized;
};

/// raw(x, y) = sum_k w(k, c) f_k(x, y) for feature maps (1, K, H, W) and head weights (K, C, 1, 1),
/// then min-max normalized (all zeros when the map is constant).
template <typename T>
CamMap compute_cam(const Tensor<T>& feature_maps, const Tensor<T>& fc_weights, std::size_t class_index);

/// (raw - min) / (max - min), or zeros for a constant map.
Map2D normalize_min_max(const Map2D& raw);

/// Align-corners bilinear interpolation to a target no smaller than the source.
Map2D upsample_bilinear(const Map2D& map, std::size_t width, std::size_t height);

/// Piecewise-linear jet: channel(v) = round(255 clamp(1.5 - |4v - a|, 0, 1)), a = 3, 2, 1 for R, G, B.
std::array<std::uint8_t, 3> jet(double v);
RgbImage colormap_jet(const Map2D& normalized);

/// round(clamp(0.4 heatmap + 0.5 image, 0, 255)) per channel, gray image broadcast to RGB.
RgbImage blend(const RgbImage& heatmap, const GrayImage& image);

/// CAM for one class rendered onto `image` (the model's 64x64 input view).
RgbImage render_cam(const CamMap& cam, const GrayImage& image);

enum class HeatmapFormat { png, ppm };

/// `<stem>.<class_name>.cam.<png|ppm>`
std::string heatmap_file_name(const std::string& stem, const std::string& class_name, HeatmapFormat format);

}  // namespace frxa
