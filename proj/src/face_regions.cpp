#include "frxa/face_regions.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace frxa {

namespace {
struct RegionEntry {
  Region region;
  std::string_view name;
  std::vector<IndexRange> ranges;
};

const std::vector<RegionEntry>& region_table() {
  static const std::vector<RegionEntry> table{
      {Region::mouth, "mouth", {{49, 68}}},
      {Region::nose, "nose", {{29, 36}}},
      {Region::eyes, "eyes", {{18, 22}, {37, 42}}},
      {Region::nose_mouth, "nose_mouth", {{29, 36}, {49, 68}}},
      {Region::nose_eyes, "nose_eyes", {{18, 22}, {29, 36}, {37, 42}}},
      {Region::mouth_eyes, "mouth_eyes", {{18, 22}, {49, 68}, {37, 42}}},
      {Region::whole_face, "whole_face", {{1, 68}}},
      // Both brows and both eyes; not one of the seven standard areas.
      {Region::eyes_symmetric, "eyes_symmetric", {{18, 27}, {37, 48}}},
  };
  return table;
}

const RegionEntry& entry(Region region) {
  for (const auto& e : region_table()) {
    if (e.region == region) return e;
  }
  throw UnknownRegion("unknown region enumerator");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view token, std::size_t line) {
  double value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value)) {
    throw LandmarkFormatError(fmt::format("line {}: '{}' is not a finite number", line, token));
  }
  return value;
}
}  // namespace

std::string_view region_name(Region region) { return entry(region).name; }

Region region_from_name(std::string_view name) {
  for (const auto& e : region_table()) {
    if (e.name == name) return e.region;
  }
  throw UnknownRegion(fmt::format("unknown region '{}'", name));
}

std::vector<IndexRange> region_ranges(Region region) { return entry(region).ranges; }

std::vector<int> region_indices(Region region) {
  std::vector<int> out;
  for (const auto& r : entry(region).ranges) {
    for (int i = r.first; i <= r.last; ++i) out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

LandmarkSet68 parse_landmarks(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    if (!line.empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (lines.empty() || lines.front() != "68") throw LandmarkFormatError("line 1: expected the point count 68");
  if (lines.size() != 69) {
    throw LandmarkFormatError(fmt::format("expected 68 point lines, found {}", lines.size() - 1));
  }
  LandmarkSet68 out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = lines[i];
    const auto split = line.find_first_of(" \t");
    if (split == std::string_view::npos) throw LandmarkFormatError(fmt::format("line {}: expected 'x y'", i + 1));
    const auto xs = trim(line.substr(0, split));
    const auto ys = trim(line.substr(split + 1));
    if (ys.find_first_of(" \t") != std::string_view::npos) {
      throw LandmarkFormatError(fmt::format("line {}: expected exactly two values", i + 1));
    }
    out.points[i - 1] = {parse_real(xs, i + 1), parse_real(ys, i + 1)};
  }
  return out;
}

std::string format_landmarks(const LandmarkSet68& landmarks) {
  std::string out = "68\n";
  for (const auto& p : landmarks.points) out += fmt::format("{} {}\n", p.x, p.y);
  return out;
}

LandmarkSet68 read_landmarks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LandmarkFormatError("cannot open landmark file " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    return parse_landmarks(text);
  } catch (const LandmarkFormatError& e) {
    throw LandmarkFormatError(path.string() + ": " + e.what());
  }
}

void write_landmarks(const std::filesystem::path& path, const LandmarkSet68& landmarks) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw LandmarkFormatError("cannot write landmark file " + path.string());
  out << format_landmarks(landmarks);
}

Box region_box(const LandmarkSet68& landmarks, Region region, std::size_t image_width, std::size_t image_height,
               double margin) {
  const auto w = static_cast<double>(image_width);
  const auto h = static_cast<double>(image_height);
  Box box{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
          std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (int index : region_indices(region)) {
    const Point2& p = landmarks.point(index);
    const double x = std::clamp(p.x, 0.0, w);
    const double y = std::clamp(p.y, 0.0, h);
    box.left = std::min(box.left, x);
    box.top = std::min(box.top, y);
    box.right = std::max(box.right, x);
    box.bottom = std::max(box.bottom, y);
  }
  const double grow = margin * std::max(box.width(), box.height());
  box.left = std::clamp(box.left - grow, 0.0, w);
  box.top = std::clamp(box.top - grow, 0.0, h);
  box.right = std::clamp(box.right + grow, 0.0, w);
  box.bottom = std::clamp(box.bottom + grow, 0.0, h);
  return box;
}

RegionCrop extract_region(const GrayImage& image, const LandmarkSet68& landmarks, Region region, double margin) {
  if (image.empty()) throw std::invalid_argument("extract_region: empty image");
  const Box box = region_box(landmarks, region, image.width, image.height, margin);
  if (!(box.width() > 0) || !(box.height() > 0)) {
    throw DegenerateRegion(fmt::format("region '{}' collapses to a zero-area box ({}, {}, {}, {})",
                                       region_name(region), box.left, box.top, box.right, box.bottom));
  }
  const auto left = static_cast<std::size_t>(std::floor(box.left));
  const auto top = static_cast<std::size_t>(std::floor(box.top));
  const auto right = std::min(image.width, static_cast<std::size_t>(std::ceil(box.right)));
  const auto bottom = std::min(image.height, static_cast<std::size_t>(std::ceil(box.bottom)));
  return {crop(image, left, top, right - left, bottom - top), box, region};
}

GrayImage pad_to_square(const GrayImage& image, std::uint8_t fill) {
  if (image.empty()) throw std::invalid_argument("pad_to_square: empty image");
  const std::size_t side = std::max(image.width, image.height);
  if (image.width == image.height) return image;
  GrayImage out(side, side, fill);
  const std::size_t left = (side - image.width) / 2;
  const std::size_t top = (side - image.height) / 2;
  for (std::size_t y = 0; y < image.height; ++y) {
    std::copy_n(&image.pixels[y * image.width], image.width, &out.pixels[(top + y) * side + left]);
  }
  return out;
}

}  // namespace frxa
