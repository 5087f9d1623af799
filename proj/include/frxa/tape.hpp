#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <vector>

#include "frxa/tensor.hpp"

namespace frxa {

template <typename T>
class Tape;

/// Handle to a value recorded on a tape.
template <typename T>
struct Var {
  Tape<T>* tape = nullptr;
  std::uint32_t index = std::numeric_limits<std::uint32_t>::max();

  [[nodiscard]] bool valid() const { return tape != nullptr; }
  [[nodiscard]] const Tensor<T>& value() const { return tape->value(*this); }
  [[nodiscard]] const Shape& shape() const { return tape->value(*this).shape(); }
};

/// Reverse-mode recorder. Operations append nodes in execution order; backward()
/// walks them in reverse, each node pushing its output gradient into its parents.
///
/// A tape is single-use: after backward() it is consumed and a second call throws.
/// Parameter leaves accumulate straight into Parameter::grad, so callers zero those
/// buffers between optimization steps.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Tensor<T>& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> input(Tensor<T> value, bool requires_grad = false);
  Var<T> parameter(Parameter<T>& param);
  /// Records an op output. `fn` is kept only when some parent requires a gradient.
  Var<T> record(Tensor<T> value, std::initializer_list<Var<T>> parents, BackwardFn fn);
  Var<T> record(Tensor<T> value, const std::vector<Var<T>>& parents, BackwardFn fn);

  [[nodiscard]] const Tensor<T>& value(Var<T> v) const;
  [[nodiscard]] bool requires_grad(Var<T> v) const { return node(v).requires_grad; }

  /// Gradient sink for `v`, allocated as zeros on first use; nullptr when `v` needs no gradient.
  Tensor<T>* grad_sink(Var<T> v);
  /// Gradient accumulated into `v` by backward(). Throws if none was produced.
  [[nodiscard]] const Tensor<T>& grad(Var<T> v) const;

  void backward(Var<T> root);

  [[nodiscard]] bool consumed() const { return consumed_; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<T> value;
    Parameter<T>* param = nullptr;
    bool requires_grad = false;
    bool has_grad = false;
    Tensor<T> grad;
    BackwardFn backward;
  };

  const Node& node(Var<T> v) const;
  Node& node(Var<T> v);
  Var<T> push(Node n);

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace frxa
