// Copyright 2026 The EVCI Augment Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EVCI_NN_TENSOR_HPP_
#define EVCI_NN_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "evci/image.hpp"
#include "evci/rng.hpp"

namespace evci::nn {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

// Dense row-major N-dimensional array. Feature maps are NCHW.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T{0});
  Tensor(Shape shape, std::vector<T> values);

  static Tensor scalar(T v) { return Tensor(Shape{1}, std::vector<T>{v}); }

  // Zero-mean Gaussian entries with the given standard deviation.
  static Tensor randn(Shape shape, Rng& rng, double stddev = 1.0);
  // Uniform entries in [lo, hi).
  static Tensor uniform(Shape shape, Rng& rng, double lo, double hi);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T* data() noexcept { return values_.data(); }
  const T* data() const noexcept { return values_.data(); }
  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  T& operator[](std::size_t i) { return values_[i]; }
  T operator[](std::size_t i) const { return values_[i]; }

  // Same values, new shape of equal size. Throws ShapeError otherwise.
  Tensor reshaped(Shape shape) const;

  void fill(T v);
  // this += other, element-wise; shapes must match.
  void accumulate(const Tensor& other);

  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> out(values_.begin(), values_.end());
    return Tensor<U>(shape_, std::move(out));
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<T> values_;
};

// [1, 3, H, W] tensor from an RGB image.
template <typename T>
Tensor<T> image_to_tensor(const Image& img);

// Inverse of image_to_tensor for a [1, 3, H, W] tensor; values are clamped
// into [0, 1].
template <typename T>
Image tensor_to_image(const Tensor<T>& t);

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace evci::nn

#endif  // EVCI_NN_TENSOR_HPP_
