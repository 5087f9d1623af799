#include <algorithm>
#include <filesystem>
#include <map>

#include <gtest/gtest.h>

#include "frxa/dataset.hpp"
#include "frxa/face_regions.hpp"
#include "geometry_cases.hpp"

using namespace frxa;

namespace {

std::vector<int> span(int a, int b) {
  std::vector<int> out;
  for (int i = a; i <= b; ++i) out.push_back(i);
  return out;
}

std::vector<int> join(std::initializer_list<std::vector<int>> parts) {
  std::vector<int> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  std::sort(out.begin(), out.end());
  return out;
}

LandmarkSet68 grid_landmarks() {
  LandmarkSet68 lm;
  for (int i = 1; i <= 68; ++i) lm.point(i) = {10.0 + (i % 10) * 4.0, 10.0 + (i / 10) * 6.0};
  return lm;
}

}  // namespace

TEST(RegionTable, IndexSetsAreExact) {
  const std::map<Region, std::vector<int>> want{
      {Region::mouth, span(49, 68)},
      {Region::nose, span(29, 36)},
      {Region::eyes, join({span(18, 22), span(37, 42)})},
      {Region::nose_mouth, join({span(29, 36), span(49, 68)})},
      {Region::nose_eyes, join({span(18, 22), span(29, 36), span(37, 42)})},
      {Region::mouth_eyes, join({span(18, 22), span(49, 68), span(37, 42)})},
      {Region::whole_face, span(1, 68)},
  };
  for (const auto& [region, indices] : want) EXPECT_EQ(region_indices(region), indices) << region_name(region);
  EXPECT_EQ(region_indices(Region::eyes_symmetric), join({span(18, 27), span(37, 48)}));
}

TEST(RegionTable, NamesRoundTripAndUnknownThrows) {
  for (Region r : kStandardRegions) EXPECT_EQ(region_from_name(region_name(r)), r);
  EXPECT_EQ(kStandardRegions.back(), Region::whole_face);
  EXPECT_THROW((void)region_from_name("forehead"), UnknownRegion);
}

TEST(RegionBox, MarginGrowsByLongSideAndClips) {
  LandmarkSet68 lm;
  for (auto& p : lm.points) p = {50, 50};
  for (int i = 49; i <= 68; ++i) lm.point(i) = {20.0 + (i - 49), 40.0 + (i % 2) * 10.0};
  const Box b = region_box(lm, Region::mouth, 100, 100, 0.1);
  // extent x [20, 39], y [40, 50]; grow 0.1 * 19
  EXPECT_NEAR(b.left, 20 - 1.9, 1e-12);
  EXPECT_NEAR(b.right, 39 + 1.9, 1e-12);
  EXPECT_NEAR(b.top, 40 - 1.9, 1e-12);
  EXPECT_NEAR(b.bottom, 50 + 1.9, 1e-12);
  const Box clipped = region_box(lm, Region::mouth, 40, 45, 0.5);
  EXPECT_EQ(clipped.right, 40.0);
  EXPECT_EQ(clipped.bottom, 45.0);
}

TEST(RegionCrop, PixelWindowCoversFractionalBox) {
  GrayImage img(30, 20);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = static_cast<std::uint8_t>(i);
  LandmarkSet68 lm;
  for (auto& p : lm.points) p = {5, 5};
  lm.point(29) = {3.5, 2.2};
  lm.point(36) = {9.2, 7.9};
  const auto crop = extract_region(img, lm, Region::nose, 0.0);
  EXPECT_EQ(crop.pixels.width, 7u);   // [3, 10)
  EXPECT_EQ(crop.pixels.height, 6u);  // [2, 8)
  EXPECT_EQ(crop.pixels.at(0, 0), img.at(3, 2));
}

TEST(RegionCrop, CollapsedRegionThrows) {
  LandmarkSet68 lm;
  for (auto& p : lm.points) p = {5, 5};
  EXPECT_THROW(extract_region(GrayImage(10, 10), lm, Region::mouth), DegenerateRegion);
  for (auto& p : lm.points) p = {-5, -5};
  EXPECT_THROW(extract_region(GrayImage(10, 10), lm, Region::whole_face), DegenerateRegion);
}

TEST(PadToSquare, CentersWithExtraPixelBottomRight) {
  GrayImage img(3, 6, 9);
  const auto sq = pad_to_square(img, 0);
  ASSERT_EQ(sq.width, 6u);
  ASSERT_EQ(sq.height, 6u);
  EXPECT_EQ(sq.at(0, 0), 0);
  EXPECT_EQ(sq.at(1, 0), 9);
  EXPECT_EQ(sq.at(3, 5), 9);
  EXPECT_EQ(sq.at(4, 0), 0);
  EXPECT_EQ(pad_to_square(GrayImage(4, 4, 1)), GrayImage(4, 4, 1));
}

TEST(Geometry, RandomLandmarkSetsSatisfyAllProperties) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto bad = frxa::testing::geometry_violations(seed);
    EXPECT_TRUE(bad.empty()) << "seed " << seed << ": " << bad.front();
  }
}

TEST(Landmarks, FormatParseRoundTripIsExact) {
  const auto lm = frxa::testing::random_landmarks(7, 90, 70);
  EXPECT_EQ(parse_landmarks(format_landmarks(lm)), lm);
}

TEST(Landmarks, SidecarFileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "frxa_roundtrip.lmk";
  const auto lm = grid_landmarks();
  write_landmarks(path, lm);
  EXPECT_EQ(read_landmarks(path), lm);
  std::filesystem::remove(path);
}

TEST(Landmarks, AcceptsBlankLinesTabsAndCrlf) {
  std::string text = "68\r\n\r\n";
  for (int i = 0; i < 68; ++i) text += std::to_string(i) + "\t" + std::to_string(i * 0.5) + "\r\n";
  const auto lm = parse_landmarks(text);
  EXPECT_EQ(lm.point(68), (Point2{67, 33.5}));
}

TEST(Landmarks, MalformedInputsReportTheLine) {
  const auto body = [](int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += "1 2\n";
    return s;
  };
  EXPECT_THROW(parse_landmarks(""), LandmarkFormatError);
  EXPECT_THROW(parse_landmarks("5\n" + body(68)), LandmarkFormatError);
  EXPECT_THROW(parse_landmarks("68\n" + body(67)), LandmarkFormatError);
  EXPECT_THROW(parse_landmarks("68\n" + body(69)), LandmarkFormatError);
  EXPECT_THROW(parse_landmarks("68\n" + body(67) + "1 2 3\n"), LandmarkFormatError);
  EXPECT_THROW(parse_landmarks("68\n" + body(67) + "nan 2\n"), LandmarkFormatError);
  try {
    parse_landmarks("68\n" + body(10) + "x 2\n" + body(57));
    FAIL();
  } catch (const LandmarkFormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 12"), std::string::npos) << e.what();
  }
}

TEST(Landmarks, MissingFileThrows) {
  EXPECT_THROW(read_landmarks("/nonexistent/face.lmk"), LandmarkFormatError);
}

TEST(Landmarks, TemplateRegionsAreNonDegenerate) {
  const auto lm = landmark_template(64);
  const GrayImage img(64, 64);
  for (Region r : kStandardRegions) {
    const auto crop = extract_region(img, lm, r);
    EXPECT_GT(crop.pixels.width, 2u) << region_name(r);
    EXPECT_GT(crop.pixels.height, 2u) << region_name(r);
  }
}

TEST(Landmarks, ExporterSidecarFixtureParses) {
  const auto lm = read_landmarks(std::filesystem::path(FRXA_FIXTURE_DIR) / "exporter_sample.lmk");
  const Box whole = region_box(lm, Region::whole_face, 128, 128, 0.0);
  const Box mouth = region_box(lm, Region::mouth, 128, 128, 0.0);
  EXPECT_TRUE(whole.contains(mouth));
  EXPECT_GT(mouth.top, region_box(lm, Region::nose, 128, 128, 0.0).top);
  EXPECT_EQ(parse_landmarks(format_landmarks(lm)), lm);
}
