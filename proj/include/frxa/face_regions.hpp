#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "frxa/image.hpp"

namespace frxa {

/// The seven landmark-defined face areas, plus an opt-in two-sided eyes variant.
enum class Region { mouth, nose, eyes, nose_mouth, nose_eyes, mouth_eyes, whole_face, eyes_symmetric };

/// The seven standard regions in report order (whole face last).
inline constexpr std::array<Region, 7> kStandardRegions{Region::mouth,      Region::nose,      Region::eyes,
                                                        Region::nose_mouth, Region::nose_eyes, Region::mouth_eyes,
                                                        Region::whole_face};

class UnknownRegion : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

[[nodiscard]] std::string_view region_name(Region region);
[[nodiscard]] Region region_from_name(std::string_view name);

/// Inclusive 1-based landmark index range.
struct IndexRange {
  int first;
  int last;
};

[[nodiscard]] std::vector<IndexRange> region_ranges(Region region);
/// Sorted 1-based landmark indices of `region`.
[[nodiscard]] std::vector<int> region_indices(Region region);

struct Point2 {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

class LandmarkFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 68 facial points in pixel coordinates; `point(i)` takes the 1-based index.
struct LandmarkSet68 {
  std::array<Point2, 68> points{};

  [[nodiscard]] const Point2& point(int index) const { return points.at(static_cast<std::size_t>(index - 1)); }
  Point2& point(int index) { return points.at(static_cast<std::size_t>(index - 1)); }

  friend bool operator==(const LandmarkSet68&, const LandmarkSet68&) = default;
};

/// Sidecar text: "68" then one "x y" line per landmark in index order.
LandmarkSet68 parse_landmarks(std::string_view text);
std::string format_landmarks(const LandmarkSet68& landmarks);
LandmarkSet68 read_landmarks(const std::filesystem::path& path);
void write_landmarks(const std::filesystem::path& path, const LandmarkSet68& landmarks);

/// Continuous box; pixel (x, y) covers [x, x+1) x [y, y+1).
struct Box {
  double left = 0;
  double top = 0;
  double right = 0;
  double bottom = 0;

  [[nodiscard]] double width() const { return right - left; }
  [[nodiscard]] double height() const { return bottom - top; }
  [[nodiscard]] bool contains(const Point2& p) const {
    return p.x >= left && p.x <= right && p.y >= top && p.y <= bottom;
  }
  [[nodiscard]] bool contains(const Box& other) const {
    return other.left >= left && other.right <= right && other.top >= top && other.bottom <= bottom;
  }
  friend bool operator==(const Box&, const Box&) = default;
};

class DegenerateRegion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RegionCrop {
  GrayImage pixels;
  Box source_box;
  Region region;
};

inline constexpr double kDefaultRegionMargin = 0.05;

/// Bounding box of the region's landmarks after clipping them to the image, grown by
/// margin * max(box_w, box_h) on every side and clipped again.
Box region_box(const LandmarkSet68& landmarks, Region region, std::size_t image_width, std::size_t image_height,
               double margin = kDefaultRegionMargin);

/// Crops region_box; the pixel window is [floor(left), ceil(right)) x [floor(top), ceil(bottom)).
RegionCrop extract_region(const GrayImage& image, const LandmarkSet68& landmarks, Region region,
                          double margin = kDefaultRegionMargin);

/// Centers `image` on an S x S canvas, S = max(w, h); odd remainders put the extra pixel bottom/right.
GrayImage pad_to_square(const GrayImage& image, std::uint8_t fill = 0);

}  // namespace frxa
