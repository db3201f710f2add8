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

#include "captrans/runner/experiment.hpp"

namespace captrans::runner {

struct PartialRow {
  ResultRow result;
  int n_epochs = 0;
  int attempt = 0;          // which LM restart supplied the weights
  bool improving = true;    // validation perplexity fell after every epoch
  int overfit_epoch = -1;   // n at which all attempts failed to keep improving

  nlohmann::json to_json() const;
  static PartialRow from_json(const nlohmann::json& j);
};

const std::vector<std::string>& partial_columns();
std::vector<std::string> partial_fields(const PartialRow& r);

struct PartialSummary {
  std::vector<PartialRow> rows;
  std::size_t failures = 0;
};

/// For each configured row and repeat, trains the source LM for exactly n
/// epochs (n = 0..max_epoch) and transfers it frozen and fine-tuned. The LM
/// must improve its validation perplexity after every epoch (epoch 0 being
/// the untrained model); a run that does not is restarted with a fresh seed,
/// up to max_attempts. When every attempt has peaked before epoch n, n is
/// recorded as the overfit epoch and larger n continue the longest-improving
/// attempt without the requirement.
///
/// Because a run's first n epochs do not depend on how long it continues,
/// one run per attempt serves every n. Writes <out>/partial_ledger.jsonl and
/// <out>/partial.csv.
PartialSummary run_partial_training(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                    bool resume = false);

}  // namespace captrans::runner
