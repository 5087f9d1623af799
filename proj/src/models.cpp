#include "frxa/models.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

namespace frxa {

void ClassifierConfig::validate() const {
  if (conv_plan.empty()) throw ConfigError("classifier conv_plan needs at least one stage");
  for (std::size_t s = 0; s < conv_plan.size(); ++s) {
    if (conv_plan[s].empty()) throw ConfigError(fmt::format("classifier stage {} has no conv layers", s));
    for (std::size_t width : conv_plan[s]) {
      if (width == 0) throw ConfigError(fmt::format("classifier stage {} has a zero-width conv", s));
    }
  }
  if (num_classes == 0) throw ConfigError("classifier needs at least one class");
  if (input_size == 0) throw ConfigError("classifier input_size must be positive");
  std::size_t size = input_size;
  for (std::size_t s = 0; s < conv_plan.size(); ++s) {
    if (size % 2 != 0) {
      throw ConfigError(fmt::format("input size {} cannot be max-pooled {} times: odd extent {} before stage {}",
                                    input_size, conv_plan.size(), size, s));
    }
    size /= 2;
  }
  if (size < 1) throw ConfigError("classifier spatial size collapses to zero");
}

std::size_t ClassifierConfig::final_spatial() const { return input_size >> conv_plan.size(); }

std::size_t ClassifierConfig::fc_inputs() const {
  const std::size_t side = final_spatial();
  return conv_plan.back().back() * side * side;
}

void VisualizerConfig::validate() const {
  if (initial_channels == 0) throw ConfigError("visualizer initial_channels must be positive");
  if (blocks == 0) throw ConfigError("visualizer needs at least one dense block");
  if (layers_per_block == 0) throw ConfigError("visualizer layers_per_block must be positive");
  if (growth_rate == 0) throw ConfigError("visualizer growth rate must be positive");
  if (!(compression > 0.0 && compression <= 1.0)) {
    throw ConfigError(fmt::format("visualizer compression {} outside (0, 1]", compression));
  }
  if (num_classes == 0) throw ConfigError("visualizer needs at least one class");
  const std::size_t pools = blocks - 1;
  if (input_size == 0 || input_size % (std::size_t{1} << pools) != 0) {
    throw ConfigError(fmt::format("input size {} is not divisible by 2^{}", input_size, pools));
  }
  for (std::size_t c : block_channels()) {
    if (c == 0) throw ConfigError("visualizer transition compresses channels to zero");
  }
}

std::vector<std::size_t> VisualizerConfig::block_channels() const {
  std::vector<std::size_t> channels;
  std::size_t c = initial_channels;
  for (std::size_t b = 0; b < blocks; ++b) {
    channels.push_back(c);
    c += layers_per_block * growth_rate;
    if (b + 1 < blocks) c = static_cast<std::size_t>(std::floor(compression * static_cast<double>(c) + 1e-9));
  }
  channels.push_back(c);
  return channels;
}

std::size_t VisualizerConfig::final_spatial() const { return input_size >> (blocks - 1); }

std::string to_string(ModelKind kind) { return kind == ModelKind::classifier ? "classifier" : "visualizer"; }

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "classifier") return ModelKind::classifier;
  if (name == "visualizer") return ModelKind::visualizer;
  throw ConfigError("unknown model kind '" + name + "' (expected classifier or visualizer)");
}

template <typename T>
struct BasicModel<T>::Impl {
  struct ConvUnit {
    Parameter<T> kernel;
    BatchNormState<T> bn;
  };
  struct DenseLayer {
    BatchNormState<T> bn1;
    Parameter<T> reduce;
    BatchNormState<T> bn2;
    Parameter<T> grow;
  };
  struct Transition {
    BatchNormState<T> bn;
    Parameter<T> conv;
  };

  ArchitectureConfig config;
  // classifier
  std::vector<std::vector<ConvUnit>> stages;
  // visualizer
  Parameter<T> stem;
  std::vector<std::vector<DenseLayer>> blocks;
  std::vector<Transition> transitions;
  BatchNormState<T> final_bn;
  // shared head
  Parameter<T> fc_w;
  Parameter<T> fc_b;
  bool fc_bias = false;

  std::mt19937_64 rng;

  explicit Impl(ArchitectureConfig cfg, std::uint64_t seed) : config(std::move(cfg)), rng(seed) {}

  Parameter<T> he_normal(const std::string& id, Shape shape, std::size_t fan_in) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    Tensor<T> value(shape);
    for (auto& v : value.data()) v = static_cast<T>(dist(rng));
    return Parameter<T>(id, std::move(value));
  }

  [[nodiscard]] ModelKind kind() const {
    return std::holds_alternative<ClassifierConfig>(config) ? ModelKind::classifier : ModelKind::visualizer;
  }

  template <typename Fn>
  void for_each_bn(BatchNormState<T>& bn, Fn&& fn) {
    fn(bn.gamma);
    fn(bn.beta);
    fn(bn.running_mean);
    fn(bn.running_var);
  }

  template <typename Fn>
  void visit(Fn&& fn) {
    if (kind() == ModelKind::classifier) {
      for (auto& stage : stages) {
        for (auto& unit : stage) {
          fn(unit.kernel);
          for_each_bn(unit.bn, fn);
        }
      }
      fn(fc_w);
      if (fc_bias) fn(fc_b);
      return;
    }
    fn(stem);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (auto& layer : blocks[b]) {
        for_each_bn(layer.bn1, fn);
        fn(layer.reduce);
        for_each_bn(layer.bn2, fn);
        fn(layer.grow);
      }
      if (b < transitions.size()) {
        for_each_bn(transitions[b].bn, fn);
        fn(transitions[b].conv);
      }
    }
    for_each_bn(final_bn, fn);
    fn(fc_w);
  }
};

template <typename T>
BasicModel<T>::BasicModel(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

template <typename T>
BasicModel<T>::~BasicModel() = default;
template <typename T>
BasicModel<T>::BasicModel(BasicModel&&) noexcept = default;
template <typename T>
BasicModel<T>& BasicModel<T>::operator=(BasicModel&&) noexcept = default;

template <typename T>
BasicModel<T> BasicModel<T>::build_classifier(const ClassifierConfig& config, std::uint64_t seed) {
  config.validate();
  auto impl = std::make_unique<Impl>(config, seed);
  std::size_t in = 1;
  for (std::size_t s = 0; s < config.conv_plan.size(); ++s) {
    auto& stage = impl->stages.emplace_back();
    stage.reserve(config.conv_plan[s].size());
    for (std::size_t l = 0; l < config.conv_plan[s].size(); ++l) {
      const std::size_t out = config.conv_plan[s][l];
      const std::string prefix = fmt::format("stage{}.conv{}", s, l);
      auto kernel = impl->he_normal(prefix + ".kernel", {out, in, 3, 3}, in * 9);
      stage.push_back({std::move(kernel), BatchNormState<T>(prefix + ".bn", out)});
      in = out;
    }
  }
  impl->fc_w = impl->he_normal("fc.weights", {config.fc_inputs(), config.num_classes, 1, 1}, config.fc_inputs());
  impl->fc_b = Parameter<T>("fc.bias", Tensor<T>({1, config.num_classes, 1, 1}));
  impl->fc_bias = true;
  return BasicModel(std::move(impl));
}

template <typename T>
BasicModel<T> BasicModel<T>::build_visualizer(const VisualizerConfig& config, std::uint64_t seed) {
  config.validate();
  auto impl = std::make_unique<Impl>(config, seed);
  const std::size_t k = config.growth_rate;
  const std::size_t bottleneck = 4 * k;
  impl->stem = impl->he_normal("stem.kernel", {config.initial_channels, 1, 3, 3}, 9);
  const auto channels = config.block_channels();
  for (std::size_t b = 0; b < config.blocks; ++b) {
    auto& block = impl->blocks.emplace_back();
    block.reserve(config.layers_per_block);
    for (std::size_t t = 0; t < config.layers_per_block; ++t) {
      const std::size_t in = channels[b] + t * k;
      const std::string prefix = fmt::format("block{}.layer{}", b, t);
      typename Impl::DenseLayer layer;
      layer.bn1 = BatchNormState<T>(prefix + ".bn1", in);
      layer.reduce = impl->he_normal(prefix + ".reduce", {bottleneck, in, 1, 1}, in);
      layer.bn2 = BatchNormState<T>(prefix + ".bn2", bottleneck);
      layer.grow = impl->he_normal(prefix + ".grow", {k, bottleneck, 3, 3}, bottleneck * 9);
      block.push_back(std::move(layer));
    }
    if (b + 1 < config.blocks) {
      const std::size_t in = channels[b] + config.layers_per_block * k;
      const std::string prefix = fmt::format("transition{}", b);
      typename Impl::Transition tr;
      tr.bn = BatchNormState<T>(prefix + ".bn", in);
      tr.conv = impl->he_normal(prefix + ".conv", {channels[b + 1], in, 1, 1}, in);
      impl->transitions.push_back(std::move(tr));
    }
  }
  const std::size_t features = channels.back();
  impl->final_bn = BatchNormState<T>("final.bn", features);
  impl->fc_w = impl->he_normal("fc.weights", {features, config.num_classes, 1, 1}, features);
  impl->fc_bias = false;
  return BasicModel(std::move(impl));
}

template <typename T>
BasicModel<T> BasicModel<T>::build(const ArchitectureConfig& config, std::uint64_t seed) {
  if (const auto* c = std::get_if<ClassifierConfig>(&config)) return build_classifier(*c, seed);
  return build_visualizer(std::get<VisualizerConfig>(config), seed);
}

template <typename T>
ModelKind BasicModel<T>::kind() const {
  return impl_->kind();
}

template <typename T>
const ArchitectureConfig& BasicModel<T>::config() const {
  return impl_->config;
}

template <typename T>
std::size_t BasicModel<T>::num_classes() const {
  return std::visit([](const auto& c) { return c.num_classes; }, impl_->config);
}

template <typename T>
ForwardResult<T> BasicModel<T>::forward(Var<T> input, Mode mode) {
  Impl& m = *impl_;
  const std::size_t size = std::visit([](const auto& c) { return c.input_size; }, m.config);
  const Shape in = input.shape();
  if (in.c != 1 || in.h != size || in.w != size) {
    throw_shape_mismatch("model input", in, Shape{in.n, 1, size, size});
  }
  Tape<T>& tape = *input.tape;
  ForwardResult<T> result;

  if (m.kind() == ModelKind::classifier) {
    Var<T> x = input;
    for (auto& stage : m.stages) {
      for (auto& unit : stage) {
        x = ops::conv2d(x, tape.parameter(unit.kernel), 1, 1);
        x = ops::relu(ops::batch_norm(x, unit.bn, mode));
      }
      x = ops::max_pool2(x);
    }
    result.logits = ops::fully_connected(x, tape.parameter(m.fc_w), std::optional<Var<T>>(tape.parameter(m.fc_b)));
    return result;
  }

  Var<T> x = ops::conv2d(input, tape.parameter(m.stem), 1, 1);
  for (std::size_t b = 0; b < m.blocks.size(); ++b) {
    for (auto& layer : m.blocks[b]) {
      Var<T> h = ops::relu(ops::batch_norm(x, layer.bn1, mode));
      h = ops::conv2d(h, tape.parameter(layer.reduce), 1, 0);
      h = ops::relu(ops::batch_norm(h, layer.bn2, mode));
      h = ops::conv2d(h, tape.parameter(layer.grow), 1, 1);
      x = ops::concat_channels(std::vector<Var<T>>{x, h});
    }
    if (b < m.transitions.size()) {
      auto& tr = m.transitions[b];
      x = ops::relu(ops::batch_norm(x, tr.bn, mode));
      x = ops::avg_pool2(ops::conv2d(x, tape.parameter(tr.conv), 1, 0));
    }
  }
  result.feature_maps = ops::relu(ops::batch_norm(x, m.final_bn, mode));
  result.features = ops::global_avg_pool(result.feature_maps);
  result.logits = ops::fully_connected(result.features, tape.parameter(m.fc_w));
  return result;
}

namespace {
constexpr std::size_t kInferenceChunk = 16;

template <typename T, typename Fn>
Tensor<T> chunked(const Tensor<T>& batch, std::size_t width, Fn&& fn) {
  const Shape s = batch.shape();
  Tensor<T> out({s.n, width, 1, 1});
  for (std::size_t start = 0; start < s.n; start += kInferenceChunk) {
    const std::size_t count = std::min(kInferenceChunk, s.n - start);
    std::vector<T> part(batch.data().begin() + static_cast<std::ptrdiff_t>(start * s.per_sample()),
                        batch.data().begin() + static_cast<std::ptrdiff_t>((start + count) * s.per_sample()));
    const Tensor<T> result = fn(Tensor<T>({count, s.c, s.h, s.w}, std::move(part)));
    std::copy(result.data().begin(), result.data().end(), out.data().begin() + static_cast<std::ptrdiff_t>(start * width));
  }
  return out;
}
}  // namespace

template <typename T>
Tensor<T> BasicModel<T>::predict(const Tensor<T>& batch) {
  return chunked(batch, num_classes(), [this](Tensor<T> part) {
    Tape<T> tape;
    auto out = forward(tape.input(std::move(part)), Mode::inference);
    return ops::softmax(out.logits.value());
  });
}

template <typename T>
Tensor<T> BasicModel<T>::bottleneck_features(const Tensor<T>& batch) {
  if (kind() != ModelKind::visualizer) throw WrongModelKind("bottleneck features need a visualizer model");
  const std::size_t width = std::get<VisualizerConfig>(impl_->config).feature_channels();
  return chunked(batch, width, [this](Tensor<T> part) {
    Tape<T> tape;
    auto out = forward(tape.input(std::move(part)), Mode::inference);
    return out.features.value();
  });
}

template <typename T>
std::vector<Parameter<T>*> BasicModel<T>::parameters() {
  std::vector<Parameter<T>*> out;
  impl_->visit([&out](Parameter<T>& p) { out.push_back(&p); });
  return out;
}

template <typename T>
std::vector<const Parameter<T>*> BasicModel<T>::parameters() const {
  std::vector<const Parameter<T>*> out;
  impl_->visit([&out](Parameter<T>& p) { out.push_back(&p); });
  return out;
}

template <typename T>
std::size_t BasicModel<T>::trainable_count() const {
  std::size_t total = 0;
  for (const auto* p : parameters()) {
    if (p->trainable) total += p->value.size();
  }
  return total;
}

template <typename T>
void BasicModel<T>::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

template <typename T>
const Parameter<T>& BasicModel<T>::fc_weights() const {
  return impl_->fc_w;
}

template <typename T>
template <typename U>
BasicModel<U> BasicModel<T>::cast() const {
  BasicModel<U> out = BasicModel<U>::build(impl_->config, 0);
  auto src = parameters();
  auto dst = out.parameters();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i]->value = src[i]->value.template cast<U>();
    dst[i]->grad = Tensor<U>(dst[i]->value.shape());
  }
  return out;
}

template class BasicModel<float>;
template class BasicModel<double>;
template BasicModel<double> BasicModel<float>::cast<double>() const;
template BasicModel<float> BasicModel<double>::cast<float>() const;

}  // namespace frxa
