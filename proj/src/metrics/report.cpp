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

#include "captrans/metrics/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "captrans/errors.hpp"

namespace captrans::metrics {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_metric_report(const std::filesystem::path& file, const std::vector<MetricRow>& rows) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  out << "metric,split,value,n_images,n_skipped\n";
  for (const auto& r : rows) {
    out << r.metric << ',' << r.split << ',' << format_double(r.value) << ',' << r.n_images << ','
        << r.n_skipped << '\n';
  }
}

std::vector<MetricRow> read_metric_report(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot read " + file.string());
  std::string line;
  std::getline(in, line);
  if (line != "metric,split,value,n_images,n_skipped") throw DataError(file.string() + ": unexpected header");
  std::vector<MetricRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[5];
    for (auto& s : f) std::getline(ss, s, ',');
    MetricRow r{f[0], f[1], std::stod(f[2]), std::stoul(f[3]), std::stoul(f[4])};
    rows.push_back(r);
  }
  return rows;
}

}  // namespace captrans::metrics
