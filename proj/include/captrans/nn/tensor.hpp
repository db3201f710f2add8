/* Copyright 2026 The captrans Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace captrans::nn {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major float32 array. Rank 1 tensors are treated as row vectors by
/// the graph; rank 2 tensors as (rows, cols) matrices.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<float> values() { return values_; }
  std::span<const float> values() const { return values_; }
  float& operator[](std::size_t i) { return values_[i]; }
  float operator[](std::size_t i) const { return values_[i]; }
  float& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  float at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

  std::span<float> row(std::size_t r) { return std::span<float>(values_).subspan(r * cols(), cols()); }
  std::span<const float> row(std::size_t r) const {
    return std::span<const float>(values_).subspan(r * cols(), cols());
  }

  void fill(float v);
  bool all_finite() const;
  /// Throws ShapeError unless every value is finite.
  void check_finite(const std::string& what) const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<float> values_;
};

/// Bitwise equality, distinguishing -0.0 from 0.0 and comparing NaN payloads.
bool bit_identical(const Tensor& a, const Tensor& b);

}  // namespace captrans::nn
