#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace frxa {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 8-bit single-channel image, row-major.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, std::uint8_t fill = 0) : width(w), height(h), pixels(w * h, fill) {}

  [[nodiscard]] bool empty() const { return width == 0 || height == 0; }
  std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  [[nodiscard]] std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// 8-bit interleaved RGB image.
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(std::size_t w, std::size_t h) : width(w), height(h), pixels(w * h * 3, 0) {}

  std::uint8_t* at(std::size_t x, std::size_t y) { return &pixels[(y * width + x) * 3]; }
  [[nodiscard]] const std::uint8_t* at(std::size_t x, std::size_t y) const { return &pixels[(y * width + x) * 3]; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);
/// Binary PPM (P6) bytes: "P6\n<w> <h>\n255\n" followed by the raw triples.
std::string encode_ppm(const RgbImage& image);
std::string encode_pgm(const GrayImage& image);

/// Grayscale PNG reader; color input is converted with BT.601 luma weights.
GrayImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbImage& image);
void write_png(const std::filesystem::path& path, const GrayImage& image);

/// Reads PGM or PNG by content signature.
GrayImage read_image(const std::filesystem::path& path);

/// Bilinear resampling with half-pixel centers.
GrayImage resize_bilinear(const GrayImage& image, std::size_t width, std::size_t height);
GrayImage crop(const GrayImage& image, std::size_t left, std::size_t top, std::size_t width, std::size_t height);
GrayImage flip_horizontal(const GrayImage& image);

}  // namespace frxa
