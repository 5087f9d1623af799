#include "gradient_cases.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "frxa/models.hpp"
#include "frxa/ops.hpp"
#include "frxa/tape.hpp"

namespace frxa::testing {

namespace {

using Rng = std::mt19937_64;

Tensor<double> random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Tensor<double> t(shape);
  for (double& v : t.data()) v = n(rng);
  return t;
}

// Values pushed at least `gap` away from zero (kinks of relu).
Tensor<double> away_from_zero(Shape shape, Rng& rng, double gap) {
  Tensor<double> t = random_tensor(shape, rng);
  for (double& v : t.data()) v = v >= 0 ? v + gap : v - gap;
  return t;
}

// Distinct values spaced by `spacing` in random order (unique pooling maxima).
Tensor<double> distinct_values(Shape shape, Rng& rng, double spacing) {
  std::vector<double> v(shape.size());
  std::iota(v.begin(), v.end(), 0.0);
  std::shuffle(v.begin(), v.end(), rng);
  for (double& x : v) x = (x - static_cast<double>(v.size()) / 2) * spacing;
  return Tensor<double>(shape, std::move(v));
}

// loss = sum(R * y) for a fixed random R, so every output coordinate carries gradient.
Var<double> scalarize(Var<double> y, std::uint64_t seed) {
  Rng rng(seed * 7919 + 17);
  return ops::weighted_sum(y, random_tensor(y.shape(), rng));
}

// Builds an evaluator from a function mapping input vars to an output var.
Evaluator simple(std::function<Var<double>(const std::vector<Var<double>>&)> build, std::uint64_t seed,
                 bool already_scalar = false) {
  return [build = std::move(build), seed, already_scalar](const std::vector<Tensor<double>>& leaves) {
    Tape<double> tape;
    std::vector<Var<double>> vars;
    for (const auto& leaf : leaves) vars.push_back(tape.input(leaf, true));
    Var<double> y = build(vars);
    Var<double> loss = already_scalar ? y : scalarize(y, seed);
    Evaluation e;
    e.loss = loss.value()[0];
    tape.backward(loss);
    for (const auto& v : vars) e.grads.push_back(tape.grad(v));
    return e;
  };
}

GradReport conv_case(std::uint64_t seed, Shape x, Shape k, std::size_t stride, std::size_t pad) {
  Rng rng(seed);
  return check_gradients(simple([=](const auto& v) { return ops::conv2d(v[0], v[1], stride, pad); }, seed),
                         {random_tensor(x, rng), random_tensor(k, rng, 0.5)});
}

GradReport batch_norm_case(std::uint64_t seed, Mode mode) {
  Rng rng(seed);
  const Shape xs{3, 4, 3, 3};
  BatchNormState<double> state("bn", xs.c);
  std::uniform_real_distribution<double> var(0.5, 2.0);
  for (double& v : state.running_mean.value.data()) v = std::normal_distribution<double>(0.0, 0.5)(rng);
  for (double& v : state.running_var.value.data()) v = var(rng);
  const Evaluator f = [&state, mode, seed](const std::vector<Tensor<double>>& leaves) {
    state.gamma.value = leaves[1];
    state.beta.value = leaves[2];
    state.gamma.zero_grad();
    state.beta.zero_grad();
    Tape<double> tape;
    const Var<double> x = tape.input(leaves[0], true);
    const Var<double> loss = scalarize(ops::batch_norm(x, state, mode), seed);
    Evaluation e;
    e.loss = loss.value()[0];
    tape.backward(loss);
    e.grads = {tape.grad(x), state.gamma.grad, state.beta.grad};
    return e;
  };
  return check_gradients(f, {random_tensor(xs, rng, 2.0), random_tensor({1, xs.c, 1, 1}, rng),
                             random_tensor({1, xs.c, 1, 1}, rng)});
}

template <typename Config>
GradReport model_case(std::uint64_t seed, const Config& config) {
  auto model = BasicModel<double>::build(config, seed);
  std::vector<Parameter<double>*> trainable;
  for (auto* p : model.parameters()) {
    if (p->trainable) trainable.push_back(p);
  }
  Rng rng(seed);
  std::vector<Tensor<double>> leaves;
  for (auto* p : trainable) leaves.push_back(p->value);
  leaves.push_back(random_tensor({2, 1, config.input_size, config.input_size}, rng));
  std::vector<int> labels{static_cast<int>(seed % config.num_classes), static_cast<int>((seed + 1) % config.num_classes)};
  const Evaluator f = [&](const std::vector<Tensor<double>>& values) {
    for (std::size_t i = 0; i < trainable.size(); ++i) trainable[i]->value = values[i];
    model.zero_grad();
    Tape<double> tape;
    const Var<double> x = tape.input(values.back(), true);
    const auto loss = ops::softmax_cross_entropy(model.forward(x, Mode::training).logits, labels);
    Evaluation e;
    e.loss = loss.loss.value()[0];
    tape.backward(loss.loss);
    for (auto* p : trainable) e.grads.push_back(p->grad);
    e.grads.push_back(tape.grad(x));
    return e;
  };
  return check_gradients(f, leaves, 1e-6, 1e-3, 6, seed);
}

}  // namespace

GradReport check_gradients(const Evaluator& f, std::vector<Tensor<double>> leaves, double eps, double floor,
                           std::size_t max_coords, std::uint64_t seed) {
  const Evaluation analytic = f(leaves);
  GradReport report;
  Rng rng(seed ^ 0x5bd1e995ULL);
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    std::vector<std::size_t> coords(leaves[l].size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (max_coords > 0 && coords.size() > max_coords) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(max_coords);
    }
    for (std::size_t i : coords) {
      const double saved = leaves[l][i];
      leaves[l][i] = saved + eps;
      const double up = f(leaves).loss;
      leaves[l][i] = saved - eps;
      const double down = f(leaves).loss;
      leaves[l][i] = saved;
      const double numeric = (up - down) / (2 * eps);
      const double a = analytic.grads[l][i];
      const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      report.max_relative_error = std::max(report.max_relative_error, err);
      ++report.coordinates;
    }
  }
  return report;
}

std::vector<GradCase> layer_gradient_cases() {
  std::vector<GradCase> cases;
  cases.push_back({"conv2d 3x3 stride1 pad1", [](std::uint64_t s) { return conv_case(s, {2, 3, 5, 5}, {4, 3, 3, 3}, 1, 1); }});
  cases.push_back({"conv2d 3x3 stride2 pad0", [](std::uint64_t s) { return conv_case(s, {2, 2, 7, 7}, {3, 2, 3, 3}, 2, 0); }});
  cases.push_back({"conv2d 1x1", [](std::uint64_t s) { return conv_case(s, {2, 5, 4, 4}, {3, 5, 1, 1}, 1, 0); }});
  cases.push_back({"relu", [](std::uint64_t s) {
                     Rng rng(s);
                     return check_gradients(simple([](const auto& v) { return ops::relu(v[0]); }, s),
                                            {away_from_zero({2, 3, 4, 4}, rng, 0.05)});
                   }});
  cases.push_back({"max_pool2", [](std::uint64_t s) {
                     Rng rng(s);
                     return check_gradients(simple([](const auto& v) { return ops::max_pool2(v[0]); }, s),
                                            {distinct_values({2, 2, 6, 6}, rng, 0.01)});
                   }});
  cases.push_back({"avg_pool2", [](std::uint64_t s) {
                     Rng rng(s);
                     return check_gradients(simple([](const auto& v) { return ops::avg_pool2(v[0]); }, s),
                                            {random_tensor({2, 3, 4, 6}, rng)});
                   }});
  cases.push_back({"global_avg_pool", [](std::uint64_t s) {
                     Rng rng(s);
                     return check_gradients(simple([](const auto& v) { return ops::global_avg_pool(v[0]); }, s),
                                            {random_tensor({2, 3, 4, 5}, rng)});
                   }});
  cases.push_back({"fully_connected with bias", [](std::uint64_t s) {
                     Rng rng(s);
                     return check_gradients(
                         simple([](const auto& v) { return ops::fully_connected(v[0], v[1], std::optional(v[2])); }, s),
                         {random_tensor({3, 2, 3, 3}, rng), random_tensor({18, 5, 1, 1}, rng, 0.3),
                          random_tensor({1, 5, 1, 1}, rng)});
                   }});
  cases.push_back({"fully_connected without bias", [](std::uint64_t s) {
                     Rng rng(s);
                     return check_gradients(simple([](const auto& v) { return ops::fully_connected(v[0], v[1]); }, s),
                                            {random_tensor({3, 6, 1, 1}, rng), random_tensor({6, 4, 1, 1}, rng)});
                   }});
  cases.push_back({"batch_norm training", [](std::uint64_t s) { return batch_norm_case(s, Mode::training); }});
  cases.push_back({"batch_norm inference", [](std::uint64_t s) { return batch_norm_case(s, Mode::inference); }});
  cases.push_back({"concat_channels", [](std::uint64_t s) {
                     Rng rng(s);
                     return check_gradients(
                         simple([](const auto& v) { return ops::concat_channels(std::vector<Var<double>>{v[0], v[1]}); }, s),
                         {random_tensor({2, 2, 3, 3}, rng), random_tensor({2, 3, 3, 3}, rng)});
                   }});
  cases.push_back({"sum", [](std::uint64_t s) {
                     Rng rng(s);
                     return check_gradients(simple([](const auto& v) { return ops::sum(v[0]); }, s, true),
                                            {random_tensor({2, 3, 2, 2}, rng)});
                   }});
  cases.push_back({"softmax_cross_entropy", [](std::uint64_t s) {
                     Rng rng(s);
                     std::vector<int> labels(4);
                     for (int& l : labels) l = std::uniform_int_distribution<int>(0, 4)(rng);
                     return check_gradients(
                         simple([labels](const auto& v) { return ops::softmax_cross_entropy(v[0], labels).loss; }, s, true),
                         {random_tensor({4, 5, 1, 1}, rng, 2.0)});
                   }});
  return cases;
}

std::vector<GradCase> model_gradient_cases() {
  std::vector<GradCase> cases;
  cases.push_back({"classifier end to end", [](std::uint64_t s) {
                     ClassifierConfig c;
                     c.conv_plan = {{3}, {4}};
                     c.num_classes = 3;
                     c.input_size = 8;
                     return model_case(s, c);
                   }});
  cases.push_back({"visualizer end to end", [](std::uint64_t s) {
                     VisualizerConfig v;
                     v.initial_channels = 4;
                     v.blocks = 2;
                     v.layers_per_block = 2;
                     v.growth_rate = 3;
                     v.num_classes = 3;
                     v.input_size = 8;
                     return model_case(s, v);
                   }});
  return cases;
}

}  // namespace frxa::testing
