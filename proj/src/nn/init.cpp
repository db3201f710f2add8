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

#include "captrans/nn/init.hpp"

#include <algorithm>
#include <cmath>

#include "captrans/errors.hpp"
#include "captrans/nn/rng.hpp"

namespace captrans::nn {

std::string to_string(InitMethod m) {
  return m == InitMethod::kNormal ? "normal" : "xavier";
}

InitMethod parse_init_method(const std::string& s) {
  if (s == "normal") return InitMethod::kNormal;
  if (s == "xavier" || s == "xavier-normal" || s == "xavier_normal") return InitMethod::kXavierNormal;
  throw ConfigError("unknown init method '" + s + "' (expected normal or xavier)");
}

void InitSpec::validate() const {
  if (!(max_abs >= 1e-5 && max_abs <= 1.0)) {
    throw ConfigError("max init weight must be in [1e-5, 1.0], got " + std::to_string(max_abs));
  }
}

Tensor init_tensor(const Shape& shape, const InitSpec& spec) {
  spec.validate();
  Tensor out(shape);  // throws on zero dimensions
  double stddev = 1.0;
  if (spec.method == InitMethod::kXavierNormal) {
    const double fan_in = static_cast<double>(shape[0]);
    const double fan_out = shape.size() == 1 ? fan_in : static_cast<double>(out.size() / shape[0]);
    stddev = std::sqrt(2.0 / (fan_in + fan_out));
  }
  Rng rng(spec.seed);
  const double bound = spec.max_abs;
  for (float& v : out.values()) {
    v = static_cast<float>(std::clamp(stddev * rng.normal(), -bound, bound));
    // float rounding may land just outside the bound
    if (std::abs(static_cast<double>(v)) > bound) v = std::nextafter(v, 0.0f);
  }
  return out;
}

}  // namespace captrans::nn
