#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "frxa/evaluation.hpp"

using namespace frxa;

namespace {

const std::vector<std::string> kThree{"a", "b", "c"};

ModelCheckpoint untrained(ModelKind kind, const Dataset& d, Region region) {
  ModelCheckpoint ckpt;
  if (kind == ModelKind::classifier) {
    ClassifierConfig c;
    c.conv_plan = {{4}, {4}};
    c.num_classes = d.class_names.size();
    ckpt = ModelCheckpoint::capture(Model::build_classifier(c, 1));
  } else {
    VisualizerConfig v;
    v.initial_channels = 8;
    v.layers_per_block = 2;
    v.growth_rate = 4;
    v.num_classes = d.class_names.size();
    ckpt = ModelCheckpoint::capture(Model::build_visualizer(v, 1));
  }
  ckpt.class_names = d.class_names;
  ckpt.region = region;
  return ckpt;
}

const Dataset& small_dataset() {
  static const Dataset d = generate_synthetic({.classes = 3, .per_class = 10, .seed = 2});
  return d;
}

}  // namespace

TEST(Confusion, SevenRightThreeWrong) {
  ConfusionMatrix m(kThree);
  for (int i = 0; i < 7; ++i) m.add(0, 0);
  for (int i = 0; i < 3; ++i) m.add(0, 2);
  EXPECT_EQ(m.count(0, 0), 7u);
  EXPECT_EQ(m.count(0, 1), 0u);
  EXPECT_EQ(m.count(0, 2), 3u);
  EXPECT_EQ(m.support(0), 10u);
  EXPECT_DOUBLE_EQ(m.accuracy(), 0.7);
  const auto n = m.normalized_rows();
  EXPECT_DOUBLE_EQ(n[0][2], 0.3);
  EXPECT_EQ(n[1], (std::vector<double>{0, 0, 0}));
}

TEST(Confusion, PerfectPredictionsAreDiagonal) {
  ConfusionMatrix m(kThree);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i <= k; ++i) m.add(k, k);
  EXPECT_EQ(m.trace(), m.total());
  EXPECT_EQ(m.accuracy(), 1.0);
  EXPECT_THROW(m.add(3, 0), std::out_of_range);
  EXPECT_EQ(ConfusionMatrix(kThree).accuracy(), 0.0);
}

TEST(Confusion, PermutationEquivariance) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> cls(0, 3);
  ConfusionMatrix m({"w", "x", "y", "z"});
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 200; ++i) pairs.emplace_back(cls(rng), cls(rng));
  for (auto [t, p] : pairs) m.add(t, p);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  ConfusionMatrix direct({"x", "z", "w", "y"});
  for (auto [t, p] : pairs) direct.add(static_cast<int>(perm[t]), static_cast<int>(perm[p]));
  EXPECT_EQ(m.permuted(perm), direct);
  EXPECT_DOUBLE_EQ(m.permuted(perm).accuracy(), m.accuracy());
}

TEST(Confusion, MaskDropsRowAndColumn) {
  ConfusionMatrix m({"neutral", "happiness", "contempt"});
  m.add(0, 0);
  m.add(1, 2);
  m.add(2, 2);
  m.add(2, 0);
  const auto k = m.masked({"contempt"});
  EXPECT_EQ(k.class_names(), (std::vector<std::string>{"neutral", "happiness"}));
  EXPECT_EQ(k.total(), 1u);
  EXPECT_EQ(k.count(0, 0), 1u);
  EXPECT_EQ(k.support(1), 0u);
}

TEST(Confusion, JsonAndTextCarryCounts) {
  ConfusionMatrix m(kThree);
  m.add(1, 2);
  const auto j = m.to_json();
  EXPECT_EQ(j["counts"][1][2], 1);
  EXPECT_EQ(j["classes"][0], "a");
  EXPECT_NE(m.to_text().find("true\\pred"), std::string::npos);
}

TEST(ConfusionGrid, BrightnessIsRowRate) {
  ConfusionMatrix m({"a", "b"});
  m.add(0, 0);
  m.add(0, 1);
  m.add(0, 1);
  m.add(0, 1);
  const auto g = render_confusion_grid(m, 4);
  ASSERT_EQ(g.width, 8u);
  EXPECT_EQ(g.at(0, 0), 64);   // round(255 * 0.25)
  EXPECT_EQ(g.at(7, 3), 191);  // round(255 * 0.75)
  EXPECT_EQ(g.at(5, 6), 0);
}

TEST(Evaluate, DeterministicAndConsistent) {
  const auto& d = small_dataset();
  const auto ckpt = untrained(ModelKind::classifier, d, Region::mouth);
  const auto a = evaluate(ckpt, d, Split::test);
  const auto b = evaluate(ckpt, d, Split::test);
  EXPECT_EQ(a.matrix, b.matrix);
  EXPECT_EQ(a.predictions, b.predictions);
  EXPECT_EQ(a.matrix.total(), 6u);
  EXPECT_DOUBLE_EQ(a.accuracy, static_cast<double>(a.matrix.trace()) / 6.0);
}

TEST(Evaluate, ClassMismatchThrows) {
  auto ckpt = untrained(ModelKind::classifier, small_dataset(), Region::mouth);
  ckpt.class_names = {"x", "y", "z"};
  EXPECT_THROW(evaluate(ckpt, small_dataset(), Split::test), ClassMismatch);
}

TEST(RegionReport, FixedOrderWithAbsentRows) {
  const auto& d = small_dataset();
  std::map<Region, ModelCheckpoint> ckpts;
  ckpts.emplace(Region::whole_face, untrained(ModelKind::classifier, d, Region::whole_face));
  ckpts.emplace(Region::mouth, untrained(ModelKind::classifier, d, Region::mouth));
  const auto r = compare_regions(ckpts, d, Split::test);
  ASSERT_EQ(r.rows.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(r.rows[i].region, kStandardRegions[i]);
  EXPECT_TRUE(r.rows[0].result.has_value());
  EXPECT_FALSE(r.rows[1].result.has_value());
  EXPECT_TRUE(r.rows[6].result.has_value());
  const auto j = r.to_json();
  EXPECT_EQ(j["regions"][6]["region"], "whole_face");
  EXPECT_EQ(j["regions"][2]["present"], false);
  EXPECT_NE(r.to_text().find("absent"), std::string::npos);
}

TEST(RegionReport, MismatchedRegionKeyThrows) {
  const auto& d = small_dataset();
  std::map<Region, ModelCheckpoint> ckpts;
  ckpts.emplace(Region::eyes, untrained(ModelKind::classifier, d, Region::mouth));
  EXPECT_THROW(compare_regions(ckpts, d, Split::test), std::invalid_argument);
}

TEST(RegionReport, HiddenClassesMasked) {
  const auto& d = small_dataset();
  std::map<Region, ModelCheckpoint> ckpts;
  ckpts.emplace(Region::mouth, untrained(ModelKind::classifier, d, Region::mouth));
  const auto r = compare_regions(ckpts, d, Split::test, {d.class_names[2]});
  EXPECT_EQ(r.rows[0].result->matrix.size(), 2u);
  EXPECT_EQ(r.to_json()["hidden_classes"][0], d.class_names[2]);
}

TEST(Features, CsvLayoutAndRowOrder) {
  const auto& d = small_dataset();
  const auto t = export_features(untrained(ModelKind::visualizer, d, Region::whole_face), d, Split::test);
  ASSERT_EQ(t.rows.size(), 6u);
  const VisualizerConfig v{.initial_channels = 8, .layers_per_block = 2, .growth_rate = 4};
  EXPECT_EQ(t.dimensions, v.feature_channels());
  const auto test = d.split(Split::test);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(t.rows[i].source_id, test[i]->source_id);
  std::ostringstream out;
  write_features_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# classes: bar_rising,blob,ring");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("source_id,label,f0,f1,", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), static_cast<long>(t.dimensions + 1));
}

TEST(Features, IdenticalInputsGiveIdenticalRows) {
  Dataset d = small_dataset();
  std::vector<std::size_t> test;
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    if (d.samples[i].split == Split::test) test.push_back(i);
  }
  d.samples[test[1]].image = d.samples[test[0]].image;
  d.samples[test[1]].landmarks = d.samples[test[0]].landmarks;
  const auto t = export_features(untrained(ModelKind::visualizer, d, Region::whole_face), d, Split::test);
  EXPECT_EQ(t.rows[0].values, t.rows[1].values);
}

TEST(Features, ClassifierCheckpointRejected) {
  const auto& d = small_dataset();
  EXPECT_THROW(export_features(untrained(ModelKind::classifier, d, Region::whole_face), d, Split::test), WrongModelKind);
}
