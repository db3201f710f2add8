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

#include <cstdint>
#include <string>

#include "captrans/nn/tensor.hpp"

namespace captrans::nn {

enum class InitMethod { kNormal, kXavierNormal };

std::string to_string(InitMethod m);
InitMethod parse_init_method(const std::string& s);

struct InitSpec {
  InitMethod method = InitMethod::kXavierNormal;
  double max_abs = 0.1;  // clip bound, [1e-5, 1]
  std::uint64_t seed = 0;

  void validate() const;
};

/// Draws a weight tensor. `normal` is N(0, 1); `xavier-normal` is
/// N(0, 2 / (fan_in + fan_out)) with fan_in = shape[0] and fan_out = the
/// product of the remaining dimensions (shape[0] for rank 1). Every value is
/// then clipped to [-max_abs, max_abs].
Tensor init_tensor(const Shape& shape, const InitSpec& spec);

}  // namespace captrans::nn
