// Copyright 2026 The txc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TXC_NN_TENSOR_H_
#define TXC_NN_TENSOR_H_

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace txc::nn {

// Dense NCHW tensor. Fully connected activations use H = W = 1.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(int n, int c, int h, int w, T fill = T(0))
      : dims_{n, c, h, w},
        values_(static_cast<size_t>(n) * c * h * w, fill) {}

  int n() const { return dims_[0]; }
  int c() const { return dims_[1]; }
  int h() const { return dims_[2]; }
  int w() const { return dims_[3]; }
  const std::array<int, 4>& dims() const { return dims_; }
  // Elements per batch item.
  size_t item_size() const { return static_cast<size_t>(c()) * h() * w(); }
  size_t size() const { return values_.size(); }

  T* data() { return values_.data(); }
  const T* data() const { return values_.data(); }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  std::span<T> item(int i) { return {data() + i * item_size(), item_size()}; }
  std::span<const T> item(int i) const {
    return {data() + i * item_size(), item_size()};
  }

  T& at(int i, int ch, int y, int x) { return values_[Offset(i, ch, y, x)]; }
  T at(int i, int ch, int y, int x) const {
    return values_[Offset(i, ch, y, x)];
  }
  T& operator[](size_t i) { return values_[i]; }
  T operator[](size_t i) const { return values_[i]; }

  void Fill(T v) { std::fill(values_.begin(), values_.end(), v); }
  bool SameShape(const Tensor& o) const { return dims_ == o.dims_; }
  bool operator==(const Tensor&) const = default;

 private:
  size_t Offset(int i, int ch, int y, int x) const {
    return ((static_cast<size_t>(i) * c() + ch) * h() + y) * w() + x;
  }

  std::array<int, 4> dims_{0, 0, 0, 0};
  std::vector<T> values_;
};

}  // namespace txc::nn

#endif  // TXC_NN_TENSOR_H_
