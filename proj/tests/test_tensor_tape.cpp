#include <gtest/gtest.h>

#include "frxa/ops.hpp"
#include "frxa/tape.hpp"
#include "frxa/tensor.hpp"

using namespace frxa;

TEST(Tensor, OffsetsAreRowMajorNchw) {
  Tensor<float> t({2, 3, 4, 5});
  EXPECT_EQ(t.size(), 120u);
  EXPECT_EQ(t.offset(1, 2, 3, 4), 119u);
  EXPECT_EQ(t.offset(0, 1, 0, 0), 20u);
  t.at(1, 0, 2, 1) = 7.0f;
  EXPECT_EQ(t[60 + 2 * 5 + 1], 7.0f);
}

TEST(Tensor, ReshapeKeepsDataAndRejectsSizeChange) {
  Tensor<double> t({1, 2, 2, 3}, std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  const auto r = t.reshaped({1, 12, 1, 1});
  EXPECT_EQ(r[11], 11.0);
  EXPECT_THROW((void)t.reshaped({1, 5, 1, 1}), ShapeError);
}

TEST(Tensor, SampleCopiesOneBatchEntry) {
  Tensor<float> t({3, 1, 1, 2}, std::vector<float>{1, 2, 3, 4, 5, 6});
  const auto s = t.sample(1);
  EXPECT_EQ(s.shape(), (Shape{1, 1, 1, 2}));
  EXPECT_EQ(s[0], 3.0f);
  EXPECT_EQ(s[1], 4.0f);
}

TEST(Tensor, CastRoundTripsExactlyRepresentableValues) {
  Tensor<float> t({1, 1, 1, 3}, std::vector<float>{0.5f, -2.25f, 1e-3f});
  EXPECT_EQ(t.cast<double>().cast<float>(), t);
}

TEST(Tensor, ConstructorRejectsWrongValueCount) {
  EXPECT_THROW(Tensor<float>({1, 1, 2, 2}, std::vector<float>{1, 2, 3}), ShapeError);
}

TEST(Tape, SecondBackwardThrows) {
  Tape<double> tape;
  const auto x = tape.input(Tensor<double>({1, 1, 1, 2}, 1.0), true);
  const auto y = ops::sum(x);
  tape.backward(y);
  EXPECT_TRUE(tape.consumed());
  EXPECT_THROW(tape.backward(y), std::logic_error);
}

TEST(Tape, NonScalarRootThrows) {
  Tape<double> tape;
  const auto x = tape.input(Tensor<double>({1, 1, 1, 2}, 1.0), true);
  EXPECT_THROW(tape.backward(ops::relu(x)), ShapeError);
}

TEST(Tape, ParameterGradientsAccumulateAcrossTapes) {
  Parameter<double> p("p", Tensor<double>({1, 1, 1, 3}, std::vector<double>{1, 2, 3}));
  for (int i = 0; i < 2; ++i) {
    Tape<double> tape;
    tape.backward(ops::sum(tape.parameter(p)));
  }
  for (double g : p.grad.data()) EXPECT_EQ(g, 2.0);
  p.zero_grad();
  for (double g : p.grad.data()) EXPECT_EQ(g, 0.0);
}

TEST(Tape, NonTrainableParameterReceivesNoGradient) {
  Parameter<double> p("stat", Tensor<double>({1, 1, 1, 2}, 1.0), false);
  Tape<double> tape;
  const auto x = tape.input(Tensor<double>({1, 1, 1, 2}, 3.0), true);
  const auto w = tape.parameter(p);
  tape.backward(ops::sum(ops::concat_channels(std::vector<Var<double>>{x, w})));
  for (double g : p.grad.data()) EXPECT_EQ(g, 0.0);
  for (double g : tape.grad(x).data()) EXPECT_EQ(g, 1.0);
}

TEST(Tape, SharedInputSumsGradientsFromBothUses) {
  Tape<double> tape;
  const auto x = tape.input(Tensor<double>({1, 1, 1, 1}, 2.0), true);
  const auto y = ops::sum(ops::concat_channels(std::vector<Var<double>>{x, x}));
  tape.backward(y);
  EXPECT_EQ(tape.grad(x)[0], 2.0);
}
