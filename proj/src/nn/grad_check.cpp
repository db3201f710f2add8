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

#include "captrans/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace captrans::nn {

GradCheckResult finite_diff_check(const LossFn& loss, ParamStore& store, double epsilon,
                                  double floor) {
  store.zero_grads();
  loss(store, true);
  std::map<std::string, Tensor> analytic;
  for (const auto& [name, p] : store) analytic.emplace(name, p.grad);

  GradCheckResult result;
  for (auto& [name, p] : store) {
    if (!p.trainable) continue;
    auto values = p.value.values();
    const Tensor& a = analytic.at(name);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const float original = values[i];
      const float up = static_cast<float>(original + epsilon);
      const float down = static_cast<float>(original - epsilon);
      values[i] = up;
      const double f_up = loss(store, false);
      values[i] = down;
      const double f_down = loss(store, false);
      values[i] = original;
      const double numeric = (f_up - f_down) / (static_cast<double>(up) - static_cast<double>(down));
      const double an = a[i];
      const double denom = std::max({std::abs(an), std::abs(numeric), floor});
      const double err = std::abs(an - numeric) / denom;
      ++result.coordinates;
      if (result.coordinates == 1 || err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_param = name;
        result.worst_index = i;
        result.analytic = an;
        result.numeric = numeric;
      }
    }
  }
  store.zero_grads();
  return result;
}

}  // namespace captrans::nn
