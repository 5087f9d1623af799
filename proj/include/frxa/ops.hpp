#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frxa/tape.hpp"
#include "frxa/tensor.hpp"

namespace frxa {

enum class Mode { training, inference };

/// Per-channel batch normalization parameters and running statistics.
/// Running statistics are stored as non-trainable parameters so checkpoints carry them.
template <typename T>
struct BatchNormState {
  Parameter<T> gamma;
  Parameter<T> beta;
  Parameter<T> running_mean;
  Parameter<T> running_var;
  double momentum = 0.1;
  double epsilon = 1e-5;

  BatchNormState() = default;
  BatchNormState(const std::string& id_prefix, std::size_t channels);

  [[nodiscard]] std::size_t channels() const { return gamma.value.shape().c; }
};

namespace ops {

/// Cross-correlation of `input` (N, Cin, H, W) with `kernels` (Cout, Cin, kH, kW), no kernel flip.
template <typename T>
Var<T> conv2d(Var<T> input, Var<T> kernels, std::size_t stride, std::size_t zero_pad);

template <typename T>
Var<T> relu(Var<T> input);

/// 2x2 window, stride 2. Ties route the gradient to the first element in row-major window order.
template <typename T>
Var<T> max_pool2(Var<T> input);

template <typename T>
Var<T> avg_pool2(Var<T> input);

/// Spatial mean of every map: (N, K, H, W) -> (N, K, 1, 1).
template <typename T>
Var<T> global_avg_pool(Var<T> input);

/// `input` is read as an N x D matrix (D = C*H*W), `weights` as D x C stored in shape (D, C, 1, 1),
/// `bias` as shape (1, C, 1, 1). Output is (N, C, 1, 1).
template <typename T>
Var<T> fully_connected(Var<T> input, Var<T> weights, std::optional<Var<T>> bias = std::nullopt);

template <typename T>
Var<T> batch_norm(Var<T> input, BatchNormState<T>& state, Mode mode);

/// Concatenation along the channel axis; all inputs share N, H, W.
template <typename T>
Var<T> concat_channels(const std::vector<Var<T>>& inputs);

/// Sum of all elements as a (1, 1, 1, 1) scalar.
template <typename T>
Var<T> sum(Var<T> input);

/// Sum of `input` weighted elementwise by a constant tensor of the same shape.
template <typename T>
Var<T> weighted_sum(Var<T> input, const Tensor<T>& weights);

template <typename T>
struct LossOutput {
  Var<T> loss;
  Tensor<T> probabilities;
};

/// Mean negative log-likelihood of `labels` under row-wise softmax of `logits` (N, C, 1, 1).
template <typename T>
LossOutput<T> softmax_cross_entropy(Var<T> logits, std::span<const int> labels);

/// Shift-stabilized row softmax; no tape involved.
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits);

}  // namespace ops
}  // namespace frxa
