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

#include <filesystem>
#include <string>
#include <vector>

namespace captrans::metrics {

struct MetricRow {
  std::string metric;
  std::string split;
  double value = 0.0;
  std::size_t n_images = 0;
  std::size_t n_skipped = 0;
};

/// CSV with header metric,split,value,n_images,n_skipped.
void write_metric_report(const std::filesystem::path& file, const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metric_report(const std::filesystem::path& file);

/// Shortest round-tripping decimal form ("nan"/"inf" for non-finite values).
std::string format_double(double v);

}  // namespace captrans::metrics
