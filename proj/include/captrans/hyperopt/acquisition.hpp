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

namespace captrans::hyperopt {

double normal_pdf(double z);
double normal_cdf(double z);

/// Expected improvement for minimisation under N(mean, std^2):
/// (best - mean) * Phi(z) + std * phi(z), z = (best - mean) / std.
/// With std == 0 it is max(best - mean, 0).
double expected_improvement(double mean, double std, double best);

}  // namespace captrans::hyperopt
