#include "frxa/tensor.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace frxa {

std::string Shape::str() const { return fmt::format("({}, {}, {}, {})", n, c, h, w); }

void throw_shape_mismatch(const std::string& what, const Shape& a, const Shape& b) {
  throw ShapeError(fmt::format("{}: shape {} is incompatible with {}", what, a.str(), b.str()));
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values) : shape_(shape), data_(std::move(values)) {
  if (data_.size() != shape_.size()) {
    throw ShapeError(fmt::format("tensor of shape {} needs {} values, got {}", shape_.str(), shape_.size(),
                                 data_.size()));
  }
}

template <typename T>
void Tensor<T>::fill(T value) {
  std::fill(data_.begin(), data_.end(), value);
}

template <typename T>
Tensor<T> Tensor<T>::reshaped(Shape shape) const {
  if (shape.size() != shape_.size()) throw_shape_mismatch("reshape", shape_, shape);
  return Tensor(shape, data_);
}

template <typename T>
Tensor<T> Tensor<T>::sample(std::size_t index) const {
  if (index >= shape_.n) throw std::out_of_range(fmt::format("sample {} of batch {}", index, shape_.n));
  const auto stride = shape_.per_sample();
  std::vector<T> out(data_.begin() + static_cast<std::ptrdiff_t>(index * stride),
                     data_.begin() + static_cast<std::ptrdiff_t>((index + 1) * stride));
  return Tensor({1, shape_.c, shape_.h, shape_.w}, std::move(out));
}

template <typename T>
bool Tensor<T>::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace frxa
