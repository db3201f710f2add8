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
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "captrans/runner/experiment.hpp"

namespace captrans::runner {

/// Append-only JSONL record of finished trials keyed by TrialSpec::key().
/// Each line is flushed as soon as it is written; a torn final line from an
/// interrupted run is ignored when reading.
class Ledger {
 public:
  /// Opens `file`. Without `resume` any previous content is discarded.
  Ledger(const std::filesystem::path& file, bool resume);

  bool done(const std::string& key) const { return entries_.count(key) != 0; }
  const nlohmann::json& get(const std::string& key) const { return entries_.at(key); }
  void record(const std::string& key, const nlohmann::json& row);
  std::size_t size() const { return entries_.size(); }

 private:
  std::filesystem::path file_;
  std::map<std::string, nlohmann::json> entries_;
};

/// Comma-separated file with a header line.
void write_csv(const std::filesystem::path& file, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& file);

struct GridOptions {
  bool resume = false;
  bool save_models = true;
  /// Only these row types (all rows when empty).
  std::vector<RowType> only_rows;
};

struct GridSummary {
  std::vector<ResultRow> rows;
  std::size_t failures = 0;
  std::size_t computed = 0;  // trials run now, as opposed to taken from the ledger
};

/// Every (row, size, mode) cell times `repeats`. One source LM is trained
/// per (row, size, repeat) and shared by its frozen and fine-tuned cells.
/// Writes <out>/ledger.jsonl, <out>/results.csv (canonical cell order) and,
/// when requested, model checkpoints under <out>/models. Trial failures are
/// recorded as rows with status "failed"; missing inputs abort the run.
GridSummary run_grid(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                     const GridOptions& options = {});

/// The trial list in canonical order: rows, sizes, repeats, modes.
std::vector<TrialSpec> enumerate_trials(const ExperimentConfig& config, const std::vector<RowType>& only_rows = {});

}  // namespace captrans::runner
