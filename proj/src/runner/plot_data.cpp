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

#include "captrans/runner/plot_data.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <vector>

#include "captrans/errors.hpp"
#include "captrans/metrics/report.hpp"
#include "captrans/runner/grid.hpp"

namespace captrans::runner {

std::string to_string(Figure f) {
  switch (f) {
    case Figure::kWmdBySize: return "wmd-by-size";
    case Figure::kPplxVsWmd: return "pplx-vs-wmd";
    case Figure::kWmdByEpoch: return "wmd-by-epoch";
  }
  return "wmd-by-size";
}

Figure parse_figure(const std::string& s) {
  if (s == "wmd-by-size") return Figure::kWmdBySize;
  if (s == "pplx-vs-wmd") return Figure::kPplxVsWmd;
  if (s == "wmd-by-epoch") return Figure::kWmdByEpoch;
  throw ConfigError("unknown figure '" + s + "' (expected wmd-by-size, pplx-vs-wmd or wmd-by-epoch)");
}

namespace {

struct Stats {
  double mean = 0.0;
  double std = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

double parse_number(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw DataError("results hold a non-numeric value '" + s + "'");
  }
}

}  // namespace

std::size_t emit_plot_data(const std::filesystem::path& results, Figure figure, const std::filesystem::path& output,
                           const std::string& metric) {
  const CsvTable table = read_csv(results);
  const std::size_t c_type = table.column("type");
  const std::size_t c_mode = table.column("mode");
  const std::size_t c_status = table.column("status");
  const std::size_t c_metric = table.column(metric);
  std::vector<const std::vector<std::string>*> ok;
  for (const auto& r : table.rows) {
    if (r[c_status] == "ok") ok.push_back(&r);
  }
  if (ok.empty()) throw DataError(results.string() + " holds no successful results");

  if (output.has_parent_path()) std::filesystem::create_directories(output.parent_path());
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + output.string());
  using metrics::format_double;
  std::size_t lines = 0;
  auto group_of = [&](const std::vector<std::string>& r) { return r[c_type] + "/" + r[c_mode]; };

  switch (figure) {
    case Figure::kWmdBySize: {
      const std::size_t c_size = table.column("corpus_size");
      std::map<std::pair<std::string, double>, std::vector<double>> cells;
      for (const auto* r : ok) cells[{group_of(*r), parse_number((*r)[c_size])}].push_back(parse_number((*r)[c_metric]));
      out << "group\tx\ty_mean\ty_std\tn\n";
      for (const auto& [k, v] : cells) {
        const Stats s = stats(v);
        out << k.first << '\t' << format_double(k.second) << '\t' << format_double(s.mean) << '\t'
            << format_double(s.std) << '\t' << v.size() << '\n';
        ++lines;
      }
      break;
    }
    case Figure::kPplxVsWmd: {
      const std::size_t c_size = table.column("corpus_size");
      const std::size_t c_pplx = table.column("lm_fair_perplexity");
      std::map<std::pair<std::string, double>, std::pair<std::vector<double>, std::vector<double>>> cells;
      for (const auto* r : ok) {
        if ((*r)[c_type] == "no-transfer") continue;
        auto& cell = cells[{group_of(*r), parse_number((*r)[c_size])}];
        cell.first.push_back(parse_number((*r)[c_pplx]));
        cell.second.push_back(parse_number((*r)[c_metric]));
      }
      out << "group\tperplexity\t" << metric << "\tsize_label\n";
      for (const auto& [k, v] : cells) {
        out << k.first << '\t' << format_double(stats(v.first).mean) << '\t' << format_double(stats(v.second).mean)
            << '\t' << static_cast<long long>(k.second) << '\n';
        ++lines;
      }
      break;
    }
    case Figure::kWmdByEpoch: {
      const std::size_t c_epoch = table.column("n_epochs");
      const std::size_t c_improving = table.column("improving");
      std::map<std::pair<std::string, int>, std::vector<double>> cells;
      std::map<std::string, int> first_bad;
      for (const auto* r : ok) {
        const std::string g = group_of(*r);
        const int n = static_cast<int>(parse_number((*r)[c_epoch]));
        cells[{g, n}].push_back(parse_number((*r)[c_metric]));
        if ((*r)[c_improving] == "false") {
          auto it = first_bad.find(g);
          if (it == first_bad.end() || n < it->second) first_bad[g] = n;
        }
      }
      out << "group\tepoch\ty_mean\ty_std\tn\toverfit_epoch\n";
      for (const auto& [k, v] : cells) {
        const Stats s = stats(v);
        const auto it = first_bad.find(k.first);
        const int marker = it == first_bad.end() ? -1 : it->second - 1;
        out << k.first << '\t' << k.second << '\t' << format_double(s.mean) << '\t' << format_double(s.std) << '\t'
            << v.size() << '\t' << marker << '\n';
        ++lines;
      }
      break;
    }
  }
  return lines;
}

}  // namespace captrans::runner
