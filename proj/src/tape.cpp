#include "frxa/tape.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace frxa {

template <typename T>
const typename Tape<T>::Node& Tape<T>::node(Var<T> v) const {
  if (v.tape != this || v.index >= nodes_.size()) throw std::logic_error("variable does not belong to this tape");
  return nodes_[v.index];
}

template <typename T>
typename Tape<T>::Node& Tape<T>::node(Var<T> v) {
  if (v.tape != this || v.index >= nodes_.size()) throw std::logic_error("variable does not belong to this tape");
  return nodes_[v.index];
}

template <typename T>
Var<T> Tape<T>::push(Node n) {
  if (consumed_) throw std::logic_error("tape already consumed by backward()");
  nodes_.push_back(std::move(n));
  return Var<T>{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename T>
Var<T> Tape<T>::input(Tensor<T> value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  return push(std::move(n));
}

template <typename T>
Var<T> Tape<T>::parameter(Parameter<T>& param) {
  if (param.grad.shape() != param.value.shape()) param.grad = Tensor<T>(param.value.shape());
  Node n;
  n.param = &param;
  n.requires_grad = param.trainable;
  return push(std::move(n));
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, std::initializer_list<Var<T>> parents, BackwardFn fn) {
  return record(std::move(value), std::vector<Var<T>>(parents), std::move(fn));
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, const std::vector<Var<T>>& parents, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  for (const auto& p : parents) n.requires_grad = n.requires_grad || node(p).requires_grad;
  if (n.requires_grad) n.backward = std::move(fn);
  return push(std::move(n));
}

template <typename T>
const Tensor<T>& Tape<T>::value(Var<T> v) const {
  const auto& n = node(v);
  return n.param ? n.param->value : n.value;
}

template <typename T>
Tensor<T>* Tape<T>::grad_sink(Var<T> v) {
  auto& n = node(v);
  if (!n.requires_grad) return nullptr;
  if (n.param) return &n.param->grad;
  if (!n.has_grad) {
    n.grad = Tensor<T>(n.value.shape());
    n.has_grad = true;
  }
  return &n.grad;
}

template <typename T>
const Tensor<T>& Tape<T>::grad(Var<T> v) const {
  const auto& n = node(v);
  if (n.param) return n.param->grad;
  if (!n.has_grad) throw std::logic_error(fmt::format("no gradient recorded for node {}", v.index));
  return n.grad;
}

template <typename T>
void Tape<T>::backward(Var<T> root) {
  if (consumed_) throw std::logic_error("tape already consumed by backward()");
  const auto& root_shape = value(root).shape();
  if (root_shape != Shape{1, 1, 1, 1}) {
    throw ShapeError(fmt::format("backward() needs a scalar root, got shape {}", root_shape.str()));
  }
  consumed_ = true;
  if (auto* g = grad_sink(root)) (*g)[0] += T{1};

  for (std::size_t i = root.index + 1; i-- > 0;) {
    auto& n = nodes_[i];
    if (!n.backward || !n.has_grad) continue;
    // Nodes are never appended once consumed, so `n.grad` stays put while parents accumulate.
    n.backward(*this, n.grad);
  }
  for (auto& n : nodes_) n.backward = nullptr;
}

template class Tape<float>;
template class Tape<double>;

}  // namespace frxa
