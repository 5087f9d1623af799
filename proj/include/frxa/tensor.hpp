#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace frxa {

/// Rank-4 shape in (batch, channels, height, width) order.
struct Shape {
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;

  [[nodiscard]] constexpr std::size_t size() const { return n * c * h * w; }
  [[nodiscard]] constexpr std::size_t per_sample() const { return c * h * w; }
  [[nodiscard]] constexpr std::size_t plane() const { return h * w; }
  [[nodiscard]] std::string str() const;

  friend constexpr bool operator==(const Shape&, const Shape&) = default;
};

/// Thrown when operand shapes disagree; the message names both shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

[[noreturn]] void throw_shape_mismatch(const std::string& what, const Shape& a, const Shape& b);

/// Dense row-major rank-4 array.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T{0}) : shape_(shape), data_(shape.size(), fill) {}
  Tensor(Shape shape, std::vector<T> values);

  [[nodiscard]] const Shape& shape() const { return shape_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }
  [[nodiscard]] bool empty() const { return data_.empty(); }

  [[nodiscard]] std::span<T> data() { return data_; }
  [[nodiscard]] std::span<const T> data() const { return data_; }
  [[nodiscard]] T* raw() { return data_.data(); }
  [[nodiscard]] const T* raw() const { return data_.data(); }

  [[nodiscard]] std::size_t offset(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return ((n * shape_.c + c) * shape_.h + y) * shape_.w + x;
  }
  T& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) { return data_[offset(n, c, y, x)]; }
  [[nodiscard]] T at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return data_[offset(n, c, y, x)];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  T operator[](std::size_t i) const { return data_[i]; }

  void fill(T value);
  /// Same data, new shape of equal element count.
  [[nodiscard]] Tensor reshaped(Shape shape) const;
  /// Copies sample `index` into a tensor of batch size 1.
  [[nodiscard]] Tensor sample(std::size_t index) const;
  [[nodiscard]] bool all_finite() const;

  template <typename U>
  [[nodiscard]] Tensor<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return Tensor<U>(shape_, std::move(out));
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_{};
  std::vector<T> data_;
};

/// A named trainable (or persistent, non-trainable) tensor with its gradient buffer.
template <typename T>
struct Parameter {
  std::string id;
  Tensor<T> value;
  Tensor<T> grad;
  bool trainable = true;

  Parameter() = default;
  Parameter(std::string id_, Tensor<T> value_, bool trainable_ = true)
      : id(std::move(id_)), value(std::move(value_)), grad(value.shape()), trainable(trainable_) {}

  void zero_grad() { grad.fill(T{0}); }
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace frxa
