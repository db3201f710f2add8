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
#include <vector>

namespace captrans::metrics {

/// Balanced transport between integer masses. flow[i][j] is the mass moved
/// from source i to sink j.
struct TransportPlan {
  std::vector<std::vector<std::int64_t>> flow;
  double cost = 0.0;  // sum of flow * cost
};

/// Exact minimum-cost transport by successive shortest augmenting paths.
/// Supplies and demands must be positive and have equal totals; cost is
/// supply.size() x demand.size() and non-negative.
TransportPlan solve_transport(const std::vector<std::int64_t>& supply, const std::vector<std::int64_t>& demand,
                              const std::vector<std::vector<double>>& cost);

}  // namespace captrans::metrics
