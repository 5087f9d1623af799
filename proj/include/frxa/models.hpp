#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "frxa/ops.hpp"

namespace frxa {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// VGG-style stack: every stage is a list of 3x3 conv widths followed by a 2x2 max-pool.
struct ClassifierConfig {
  std::vector<std::vector<std::size_t>> conv_plan{{64, 64}, {128, 128}, {256, 256, 256}, {256, 256, 256}};
  std::size_t num_classes = 7;
  std::size_t input_size = 64;

  void validate() const;
  [[nodiscard]] std::size_t final_spatial() const;
  [[nodiscard]] std::size_t fc_inputs() const;
};

/// DenseNet-BC: initial 3x3 conv, `blocks` dense blocks with bottleneck layers, transitions in between.
struct VisualizerConfig {
  std::size_t initial_channels = 16;
  std::size_t blocks = 3;
  std::size_t layers_per_block = 16;
  std::size_t growth_rate = 12;
  double compression = 0.5;
  std::size_t num_classes = 7;
  std::size_t input_size = 64;

  void validate() const;
  /// Channels entering each dense block, followed by the channel count of the final feature maps.
  [[nodiscard]] std::vector<std::size_t> block_channels() const;
  [[nodiscard]] std::size_t feature_channels() const { return block_channels().back(); }
  [[nodiscard]] std::size_t final_spatial() const;
};

enum class ModelKind { classifier, visualizer };

[[nodiscard]] std::string to_string(ModelKind kind);
[[nodiscard]] ModelKind model_kind_from_string(const std::string& name);

using ArchitectureConfig = std::variant<ClassifierConfig, VisualizerConfig>;

class WrongModelKind : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Forward-pass byproducts. `feature_maps` and `features` are only set for the visualizer.
template <typename T>
struct ForwardResult {
  Var<T> logits;
  Var<T> feature_maps;
  Var<T> features;
};

/// Either architecture, holding its parameters in declaration order.
template <typename T>
class BasicModel {
 public:
  BasicModel(const BasicModel&) = delete;
  BasicModel& operator=(const BasicModel&) = delete;
  BasicModel(BasicModel&&) noexcept;
  BasicModel& operator=(BasicModel&&) noexcept;
  ~BasicModel();

  static BasicModel build_classifier(const ClassifierConfig& config, std::uint64_t seed);
  static BasicModel build_visualizer(const VisualizerConfig& config, std::uint64_t seed);
  static BasicModel build(const ArchitectureConfig& config, std::uint64_t seed);

  [[nodiscard]] ModelKind kind() const;
  [[nodiscard]] const ArchitectureConfig& config() const;
  [[nodiscard]] std::size_t num_classes() const;

  ForwardResult<T> forward(Var<T> input, Mode mode);

  /// Softmax probabilities for a batch (N, 1, S, S), inference mode.
  Tensor<T> predict(const Tensor<T>& batch);
  /// GAP outputs of the visualizer, shape (N, K, 1, 1).
  Tensor<T> bottleneck_features(const Tensor<T>& batch);

  /// Every persistent tensor (trainable and running statistics) in declaration order.
  [[nodiscard]] std::vector<Parameter<T>*> parameters();
  [[nodiscard]] std::vector<const Parameter<T>*> parameters() const;
  [[nodiscard]] std::size_t trainable_count() const;
  void zero_grad();

  /// Head weights (K, C, 1, 1).
  [[nodiscard]] const Parameter<T>& fc_weights() const;

  /// Same architecture and values in another precision.
  template <typename U>
  [[nodiscard]] BasicModel<U> cast() const;

  struct Impl;

 private:
  explicit BasicModel(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;

  template <typename U>
  friend class BasicModel;
};

using Model = BasicModel<float>;

extern template class BasicModel<float>;
extern template class BasicModel<double>;

}  // namespace frxa
