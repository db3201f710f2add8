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

#include "captrans/hyperopt/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "captrans/errors.hpp"

namespace captrans::hyperopt {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mean, double std, double best) {
  if (!(std >= 0.0)) throw ConfigError("standard deviation must be non-negative");
  const double gain = best - mean;
  if (std == 0.0) return std::max(gain, 0.0);
  const double z = gain / std;
  // Round-off can leave a tiny negative value far in the lower tail.
  return std::max(gain * normal_cdf(z) + std * normal_pdf(z), 0.0);
}

}  // namespace captrans::hyperopt
