#include <cmath>

#include <gtest/gtest.h>

#include "frxa/checkpoint.hpp"
#include "frxa/training.hpp"
#include "temp_dir.hpp"

using namespace frxa;

namespace {

ClassifierConfig tiny_classifier(std::size_t classes) {
  ClassifierConfig c;
  c.conv_plan = {{4}, {4}};
  c.num_classes = classes;
  return c;
}

TrainConfig quick(std::size_t epochs) {
  TrainConfig t;
  t.max_epochs = epochs;
  t.runs = 1;
  t.batch_size = 8;
  t.seed = 11;
  return t;
}

const Dataset& small_dataset() {
  static const Dataset d = generate_synthetic({.classes = 2, .per_class = 10, .seed = 3});
  return d;
}

}  // namespace

TEST(Adam, FirstStepMovesByLearningRate) {
  Parameter<float> p("w", Tensor<float>({1, 1, 1, 1}, 0.0f));
  p.grad[0] = 0.3f;
  std::vector<Parameter<float>*> ps{&p};
  AdamState s;
  adam_step(ps, s, 0.05);
  EXPECT_NEAR(p.value[0], -0.0499999983, 1e-7);
  EXPECT_EQ(s.t, 1u);
}

TEST(Adam, ConvergesOnQuadratic) {
  Parameter<float> p("w", Tensor<float>({1, 1, 1, 1}, 1.0f));
  std::vector<Parameter<float>*> ps{&p};
  AdamState s;
  for (int i = 0; i < 200; ++i) {
    p.grad[0] = 2.0f * p.value[0];
    adam_step(ps, s, 0.05);
  }
  EXPECT_LT(std::abs(p.value[0]), 0.1f);
  EXPECT_NEAR(p.value[0], 2.845e-5, 1e-4);
}

TEST(Adam, ZeroGradientLeavesWeightsAndSkipsFrozen) {
  Parameter<float> p("w", Tensor<float>({1, 1, 1, 2}, 0.7f));
  Parameter<float> frozen("s", Tensor<float>({1, 1, 1, 1}, 2.0f), false);
  frozen.grad[0] = 5.0f;
  std::vector<Parameter<float>*> ps{&p, &frozen};
  AdamState s;
  adam_step(ps, s, 0.1);
  EXPECT_EQ(p.value[0], 0.7f);
  EXPECT_EQ(frozen.value[0], 2.0f);
}

TEST(Adam, ShapeChangeThrows) {
  Parameter<float> p("w", Tensor<float>({1, 1, 1, 2}));
  std::vector<Parameter<float>*> ps{&p};
  AdamState s;
  adam_step(ps, s, 0.1);
  Parameter<float> q("w", Tensor<float>({1, 1, 1, 3}));
  std::vector<Parameter<float>*> qs{&q};
  EXPECT_THROW(adam_step(qs, s, 0.1), ShapeError);
  EXPECT_THROW(adam_step(ps, s, 0.0), std::invalid_argument);
}

TEST(TrainConfig, ValidationAndJsonRoundTrip) {
  TrainConfig c;
  c.lr0 = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.lr_decay_factor = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.runs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.seed = 99;
  c.padding = false;
  EXPECT_EQ(TrainConfig::from_json(c.to_json()).to_json(), c.to_json());
}

TEST(Metrics, ArgmaxTiesAndAccuracy) {
  Tensor<float> s({3, 3, 1, 1}, std::vector<float>{1, 1, 0, 0, 2, 2, 0, 0, 3});
  EXPECT_EQ(argmax_rows(s), (std::vector<int>{0, 1, 2}));
  const std::vector<int> p{0, 1, 2, 2}, l{0, 1, 1, 2};
  EXPECT_DOUBLE_EQ(accuracy(p, l), 0.75);
}

TEST(EpochRecord, LogLineFormat) {
  const EpochRecord r{0, 3, 0.025, 0.5, 0.75};
  EXPECT_EQ(r.log_line(), "run=0 epoch=3 lr=0.025 train_loss=0.5 test_acc=0.75");
}

TEST(Train, ScheduleIsNonIncreasingAndFloored) {
  auto cfg = quick(12);
  cfg.lr_patience = 1;
  cfg.stop_patience = 50;
  cfg.min_lr = 0.01;
  const auto r = train(tiny_classifier(2), small_dataset(), Region::mouth, cfg);
  ASSERT_FALSE(r.log.empty());
  EXPECT_EQ(r.log.front().lr, 0.05);
  for (std::size_t i = 1; i < r.log.size(); ++i) {
    EXPECT_LE(r.log[i].lr, r.log[i - 1].lr);
    EXPECT_GE(r.log[i].lr, 0.01);
  }
}

TEST(Train, EarlyStoppingEndsRun) {
  auto cfg = quick(60);
  cfg.stop_patience = 2;
  const auto r = train(tiny_classifier(2), small_dataset(), Region::mouth, cfg);
  EXPECT_LT(r.log.size(), 60u);
  EXPECT_EQ(r.runs.at(0).epochs, r.log.size());
  EXPECT_LE(r.runs[0].epochs - r.runs[0].best_epoch, 3u);
}

TEST(Train, FixedSeedIsBitReproducible) {
  auto cfg = quick(3);
  cfg.runs = 2;
  const auto a = train(tiny_classifier(2), small_dataset(), Region::mouth, cfg);
  const auto b = train(tiny_classifier(2), small_dataset(), Region::mouth, cfg);
  EXPECT_EQ(serialize_checkpoint(a.checkpoint), serialize_checkpoint(b.checkpoint));
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) EXPECT_EQ(a.log[i].log_line(), b.log[i].log_line());
  EXPECT_EQ(a.runs.size(), 2u);
  EXPECT_EQ(a.runs[1].seed, 12u);
}

TEST(Train, CheckpointRecordsProvenance) {
  auto cfg = quick(2);
  cfg.padding = false;
  const auto r = train(tiny_classifier(2), small_dataset(), Region::nose, cfg);
  EXPECT_EQ(r.checkpoint.region, Region::nose);
  EXPECT_FALSE(r.checkpoint.padding);
  EXPECT_EQ(r.checkpoint.class_names, small_dataset().class_names);
  EXPECT_EQ(r.checkpoint.best_test_accuracy, r.runs[r.best_run].best_test_accuracy);
  EXPECT_EQ(r.checkpoint.training["config"]["padding"], false);
}

TEST(Train, DivergenceIsReported) {
  auto cfg = quick(5);
  cfg.lr0 = 1e38;
  EXPECT_THROW(train(tiny_classifier(2), small_dataset(), Region::mouth, cfg), DivergenceError);
}

TEST(Train, ClassCountAndEmptySplitsRejected) {
  EXPECT_THROW(train(tiny_classifier(3), small_dataset(), Region::mouth, quick(1)), ConfigError);
  Dataset only_train = small_dataset();
  std::erase_if(only_train.samples, [](const LabeledFace& f) { return f.split == Split::test; });
  EXPECT_THROW(train(tiny_classifier(2), only_train, Region::mouth, quick(1)), EmptyDatasetError);
}

TEST(Checkpoint, SerializationRoundTripIsBitExact) {
  VisualizerConfig v;
  v.layers_per_block = 2;
  v.num_classes = 3;
  auto ckpt = ModelCheckpoint::capture(Model::build_visualizer(v, 4));
  ckpt.class_names = {"a", "b", "c"};
  ckpt.region = Region::mouth_eyes;
  ckpt.normalization = {0.4, 0.2};
  ckpt.best_test_accuracy = 0.6;
  const auto bytes = serialize_checkpoint(ckpt);
  EXPECT_EQ(bytes.substr(0, 5), "FRXA1");
  const auto back = deserialize_checkpoint(bytes);
  EXPECT_EQ(serialize_checkpoint(back), bytes);
  EXPECT_EQ(back.tensors, ckpt.tensors);
  EXPECT_EQ(back.kind(), ModelKind::visualizer);
  EXPECT_EQ(back.normalization.mean, 0.4);
  const auto m = back.instantiate();
  EXPECT_EQ(m.trainable_count(), Model::build_visualizer(v, 0).trainable_count());
}

TEST(Checkpoint, CorruptInputsThrow) {
  auto ckpt = ModelCheckpoint::capture(Model::build_classifier(tiny_classifier(2), 0));
  ckpt.class_names = {"a", "b"};
  const auto bytes = serialize_checkpoint(ckpt);
  EXPECT_THROW(deserialize_checkpoint("FRXA2" + bytes.substr(5)), CheckpointError);
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, bytes.size() - 1)), CheckpointError);
  EXPECT_THROW(deserialize_checkpoint(bytes + "x"), CheckpointError);
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, 7)), CheckpointError);
  EXPECT_THROW(load_checkpoint("/nonexistent/model.frxa"), CheckpointError);
}

TEST(Checkpoint, ClassMismatchThrows) {
  auto ckpt = ModelCheckpoint::capture(Model::build_classifier(tiny_classifier(2), 0));
  ckpt.class_names = {"a", "b"};
  EXPECT_NO_THROW(ckpt.require_classes({"a", "b"}));
  EXPECT_THROW(ckpt.require_classes({"b", "a"}), ClassMismatch);
}

TEST(Checkpoint, FileRoundTrip) {
  frxa::testing::TempDir dir;
  auto ckpt = ModelCheckpoint::capture(Model::build_classifier(tiny_classifier(2), 0));
  ckpt.class_names = {"a", "b"};
  save_checkpoint(dir / "m.frxa", ckpt);
  EXPECT_EQ(serialize_checkpoint(load_checkpoint(dir / "m.frxa")), serialize_checkpoint(ckpt));
}
