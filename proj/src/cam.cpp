#include "frxa/cam.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace frxa {

template <typename T>
CamMap compute_cam(const Tensor<T>& feature_maps, const Tensor<T>& fc_weights, std::size_t class_index) {
  const Shape f = feature_maps.shape();
  const Shape w = fc_weights.shape();
  if (f.n != 1) throw ShapeError(fmt::format("compute_cam: expected one sample of feature maps, got {}", f.str()));
  if (w.n != f.c || w.h != 1 || w.w != 1) throw_shape_mismatch("compute_cam feature/weight", f, w);
  if (class_index >= w.c) {
    throw std::out_of_range(fmt::format("compute_cam: class {} out of range for {} classes", class_index, w.c));
  }
  CamMap cam;
  cam.class_index = class_index;
  cam.raw = Map2D(f.w, f.h);
  for (std::size_t k = 0; k < f.c; ++k) {
    const double weight = static_cast<double>(fc_weights.at(k, class_index, 0, 0));
    for (std::size_t y = 0; y < f.h; ++y) {
      for (std::size_t x = 0; x < f.w; ++x) cam.raw.at(x, y) += weight * static_cast<double>(feature_maps.at(0, k, y, x));
    }
  }
  cam.normalized = normalize_min_max(cam.raw);
  return cam;
}

template CamMap compute_cam<float>(const Tensor<float>&, const Tensor<float>&, std::size_t);
template CamMap compute_cam<double>(const Tensor<double>&, const Tensor<double>&, std::size_t);

Map2D normalize_min_max(const Map2D& raw) {
  Map2D out(raw.width, raw.height);
  if (raw.values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(raw.values.begin(), raw.values.end());
  const double min = *lo, range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < raw.values.size(); ++i) out.values[i] = (raw.values[i] - min) / range;
  return out;
}

Map2D upsample_bilinear(const Map2D& map, std::size_t width, std::size_t height) {
  if (map.width == 0 || map.height == 0) throw std::invalid_argument("upsample_bilinear: empty map");
  if (width < map.width || height < map.height) {
    throw std::invalid_argument(fmt::format("upsample_bilinear: target {}x{} smaller than source {}x{}", width, height,
                                            map.width, map.height));
  }
  const auto axis = [](std::size_t out, std::size_t in, std::size_t i) {
    const double pos = out > 1 ? static_cast<double>(i) * static_cast<double>(in - 1) / static_cast<double>(out - 1) : 0.0;
    const auto i0 = std::min(static_cast<std::size_t>(pos), in - 1);
    const std::size_t i1 = std::min(i0 + 1, in - 1);
    return std::tuple{i0, i1, pos - static_cast<double>(i0)};
  };
  Map2D out(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    const auto [y0, y1, fy] = axis(height, map.height, y);
    for (std::size_t x = 0; x < width; ++x) {
      const auto [x0, x1, fx] = axis(width, map.width, x);
      const double top = map.at(x0, y0) * (1 - fx) + map.at(x1, y0) * fx;
      const double bottom = map.at(x0, y1) * (1 - fx) + map.at(x1, y1) * fx;
      out.at(x, y) = top * (1 - fy) + bottom * fy;
    }
  }
  return out;
}

std::array<std::uint8_t, 3> jet(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::out_of_range(fmt::format("jet: value {} outside [0, 1]", v));
  const auto channel = [v](double a) {
    return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(1.5 - std::abs(4.0 * v - a), 0.0, 1.0)));
  };
  return {channel(3.0), channel(2.0), channel(1.0)};
}

RgbImage colormap_jet(const Map2D& normalized) {
  RgbImage out(normalized.width, normalized.height);
  for (std::size_t i = 0; i < normalized.values.size(); ++i) {
    const auto rgb = jet(normalized.values[i]);
    std::copy(rgb.begin(), rgb.end(), out.pixels.begin() + static_cast<std::ptrdiff_t>(3 * i));
  }
  return out;
}

RgbImage blend(const RgbImage& heatmap, const GrayImage& image) {
  if (heatmap.width != image.width || heatmap.height != image.height) {
    throw std::invalid_argument(fmt::format("blend: heatmap {}x{} vs image {}x{}", heatmap.width, heatmap.height,
                                            image.width, image.height));
  }
  RgbImage out(image.width, image.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const double v = 0.4 * heatmap.pixels[i] + 0.5 * image.pixels[i / 3];
    out.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
  }
  return out;
}

RgbImage render_cam(const CamMap& cam, const GrayImage& image) {
  const Map2D up = upsample_bilinear(cam.normalized, image.width, image.height);
  Map2D clamped = up;
  for (double& v : clamped.values) v = std::clamp(v, 0.0, 1.0);
  return blend(colormap_jet(clamped), image);
}

std::string heatmap_file_name(const std::string& stem, const std::string& class_name, HeatmapFormat format) {
  return fmt::format("{}.{}.cam.{}", stem, class_name, format == HeatmapFormat::png ? "png" : "ppm");
}

}  // namespace frxa
