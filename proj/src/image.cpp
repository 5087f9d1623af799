#include "frxa/image.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>
#include <png.h>

namespace frxa {
namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ImageIoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageIoError("short write to " + path.string());
}

// Netpbm header token reader that skips whitespace and '#' comments.
class PnmHeader {
 public:
  PnmHeader(const std::string& bytes, const std::filesystem::path& path) : bytes_(bytes), path_(path) {}

  std::string token() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) throw ImageIoError("truncated header in " + path_.string());
    return bytes_.substr(start, pos_ - start);
  }

  std::size_t number() {
    const std::string t = token();
    std::size_t value = 0;
    for (char ch : t) {
      if (ch < '0' || ch > '9') throw ImageIoError(fmt::format("bad header field '{}' in {}", t, path_.string()));
      value = value * 10 + static_cast<std::size_t>(ch - '0');
    }
    return value;
  }

  // Exactly one whitespace byte separates the header from binary data.
  std::size_t data_start() const { return pos_ + 1; }

 private:
  void skip() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  PnmHeader header(bytes, path);
  const std::string magic = header.token();
  if (magic != "P5" && magic != "P2") throw ImageIoError("not a PGM file: " + path.string());
  const std::size_t w = header.number();
  const std::size_t h = header.number();
  const std::size_t maxval = header.number();
  if (w == 0 || h == 0) throw ImageIoError("empty PGM: " + path.string());
  if (maxval == 0 || maxval > 255) throw ImageIoError(fmt::format("unsupported PGM maxval {} in {}", maxval, path.string()));
  GrayImage image(w, h);
  if (magic == "P5") {
    const std::size_t start = header.data_start();
    if (bytes.size() < start + w * h) throw ImageIoError("truncated PGM data in " + path.string());
    std::memcpy(image.pixels.data(), bytes.data() + start, w * h);
  } else {
    for (auto& px : image.pixels) px = static_cast<std::uint8_t>(header.number());
  }
  if (maxval != 255) {
    for (auto& px : image.pixels) px = static_cast<std::uint8_t>(std::lround(255.0 * std::min<double>(px, maxval) / maxval));
  }
  return image;
}

std::string encode_pgm(const GrayImage& image) {
  std::string out = fmt::format("P5\n{} {}\n255\n", image.width, image.height);
  out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  return out;
}

std::string encode_ppm(const RgbImage& image) {
  std::string out = fmt::format("P6\n{} {}\n255\n", image.width, image.height);
  out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  return out;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) { spit(path, encode_pgm(image)); }

void write_ppm(const std::filesystem::path& path, const RgbImage& image) { spit(path, encode_ppm(image)); }

GrayImage read_png(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.string().c_str())) {
    throw ImageIoError(fmt::format("cannot read PNG {}: {}", path.string(), png.message));
  }
  png.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, rgb.data(), 0, nullptr)) {
    png_image_free(&png);
    throw ImageIoError(fmt::format("cannot decode PNG {}: {}", path.string(), png.message));
  }
  GrayImage image(png.width, png.height);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    const double y = 0.299 * rgb[3 * i] + 0.587 * rgb[3 * i + 1] + 0.114 * rgb[3 * i + 2];
    image.pixels[i] = static_cast<std::uint8_t>(std::clamp<long>(std::lround(y), 0, 255));
  }
  return image;
}

namespace {
void write_png_raw(const std::filesystem::path& path, std::size_t w, std::size_t h, std::uint32_t format,
                   const std::uint8_t* data) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(w);
  png.height = static_cast<png_uint_32>(h);
  png.format = format;
  if (!png_image_write_to_file(&png, path.string().c_str(), 0, data, 0, nullptr)) {
    throw ImageIoError(fmt::format("cannot write PNG {}: {}", path.string(), png.message));
  }
}
}  // namespace

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  write_png_raw(path, image.width, image.height, PNG_FORMAT_RGB, image.pixels.data());
}

void write_png(const std::filesystem::path& path, const GrayImage& image) {
  write_png_raw(path, image.width, image.height, PNG_FORMAT_GRAY, image.pixels.data());
}

GrayImage read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  std::array<char, 8> sig{};
  in.read(sig.data(), sig.size());
  if (in.gcount() >= 2 && sig[0] == 'P' && (sig[1] == '5' || sig[1] == '2')) return read_pgm(path);
  static constexpr std::array<unsigned char, 8> kPng{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (in.gcount() == 8 && std::memcmp(sig.data(), kPng.data(), 8) == 0) return read_png(path);
  throw ImageIoError("unsupported image format (expected PGM or PNG): " + path.string());
}

GrayImage resize_bilinear(const GrayImage& image, std::size_t width, std::size_t height) {
  if (image.empty() || width == 0 || height == 0) throw std::invalid_argument("resize_bilinear: empty extent");
  if (image.width == width && image.height == height) return image;
  GrayImage out(width, height);
  const double sx = static_cast<double>(image.width) / static_cast<double>(width);
  const double sy = static_cast<double>(image.height) / static_cast<double>(height);
  const double max_x = static_cast<double>(image.width - 1);
  const double max_y = static_cast<double>(image.height - 1);
  for (std::size_t y = 0; y < height; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, image.height - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < width; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, image.width - 1);
      const double wx = fx - static_cast<double>(x0);
      const double top = image.at(x0, y0) * (1 - wx) + image.at(x1, y0) * wx;
      const double bottom = image.at(x0, y1) * (1 - wx) + image.at(x1, y1) * wx;
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp<long>(std::lround(top * (1 - wy) + bottom * wy), 0, 255));
    }
  }
  return out;
}

GrayImage crop(const GrayImage& image, std::size_t left, std::size_t top, std::size_t width, std::size_t height) {
  if (left + width > image.width || top + height > image.height || width == 0 || height == 0) {
    throw std::out_of_range(fmt::format("crop {}x{}+{}+{} outside {}x{} image", width, height, left, top, image.width,
                                        image.height));
  }
  GrayImage out(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    const auto* src = &image.pixels[(top + y) * image.width + left];
    std::copy(src, src + width, &out.pixels[y * width]);
  }
  return out;
}

GrayImage flip_horizontal(const GrayImage& image) {
  GrayImage out(image.width, image.height);
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x) out.at(x, y) = image.at(image.width - 1 - x, y);
  }
  return out;
}

}  // namespace frxa
