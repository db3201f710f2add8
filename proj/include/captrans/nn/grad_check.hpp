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

#include <functional>
#include <string>

#include "captrans/nn/param_store.hpp"

namespace captrans::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

/// Signature of a checked loss. When `accumulate` is true the function must
/// also add d(loss)/d(param) into the store's gradient accumulators.
using LossFn = std::function<double(ParamStore& store, bool accumulate)>;

/// Compares analytic gradients with central differences over every trainable
/// coordinate. The step is taken on the float32 parameter, and the divisor is
/// the step actually realised after rounding. Relative error is
/// |a - n| / max(|a|, |n|, floor).
GradCheckResult finite_diff_check(const LossFn& loss, ParamStore& store, double epsilon = 1e-3,
                                  double floor = 1e-6);

}  // namespace captrans::nn
