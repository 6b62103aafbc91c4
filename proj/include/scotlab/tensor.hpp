#pragma once

#include <algorithm>
#include <memory>

#include "scotlab/common.hpp"

namespace scotlab {

template <class T>
class Tape;

// Dense row-major tensor. Plain value type: copies share the buffer,
// ops never mutate their inputs. `tape`/`node` tie a tensor to the
// autodiff tape that produced it (leaves get them via Tape::watch).
template <class T>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(Shape shape) : shape_(std::move(shape)), size_(numel(shape_)) {
    data_ = std::shared_ptr<T[]>(new T[size_t(size_)]());
  }

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }

  static Tensor full(Shape shape, T v) {
    Tensor t(std::move(shape));
    std::fill(t.data(), t.data() + t.size(), v);
    return t;
  }

  static Tensor ones(Shape shape) { return full(std::move(shape), T(1)); }

  static Tensor scalar(T v) { return full({}, v); }

  static Tensor from(Shape shape, const std::vector<T>& values) {
    Tensor t(std::move(shape));
    if (int64_t(values.size()) != t.size())
      throw ShapeError("from(): " + std::to_string(values.size()) + " values for shape " +
                       shape_str(t.shape()));
    std::copy(values.begin(), values.end(), t.data());
    return t;
  }

  template <class U>
  static Tensor cast_from(const Tensor<U>& other) {
    Tensor t(other.shape());
    for (int64_t i = 0; i < t.size(); ++i) t[i] = T(other[i]);
    return t;
  }

  const Shape& shape() const { return shape_; }
  int rank() const { return int(shape_.size()); }
  int64_t dim(int i) const { return shape_[size_t(i)]; }
  int64_t size() const { return size_; }
  bool defined() const { return data_ != nullptr; }

  T* data() { return data_.get(); }
  const T* data() const { return data_.get(); }
  T& operator[](int64_t i) { return data_[i]; }
  const T& operator[](int64_t i) const { return data_[i]; }

  T item() const {
    if (size_ != 1) throw ShapeError("item() on tensor of shape " + shape_str(shape_));
    return data_[0];
  }

  // Shares the buffer; only the shape changes.
  Tensor reshaped(Shape shape) const {
    if (numel(shape) != size_)
      throw ShapeError("reshape " + shape_str(shape_) + " -> " + shape_str(shape));
    Tensor t;
    t.shape_ = std::move(shape);
    t.size_ = size_;
    t.data_ = data_;
    return t;
  }

  Tensor clone() const {
    Tensor t(shape_);
    std::copy(data(), data() + size_, t.data());
    return t;
  }

  bool same_buffer(const Tensor& o) const { return data_ == o.data_; }

  Tape<T>* tape = nullptr;
  int64_t node = -1;

 private:
  Shape shape_;
  std::shared_ptr<T[]> data_;
  int64_t size_ = 0;
};

template <class T>
Tensor<T> zeros_like(const Tensor<T>& t) {
  return Tensor<T>::zeros(t.shape());
}

template <class T>
Tensor<T> ones_like(const Tensor<T>& t) {
  return Tensor<T>::ones(t.shape());
}

template <class T>
bool bitwise_equal(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) return false;
  for (int64_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace scotlab
